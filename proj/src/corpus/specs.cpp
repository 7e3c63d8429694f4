#include "erfr/corpus.hpp"

#include <cctype>

namespace erfr {
namespace {

InputSpec input(std::string name, std::string label, std::vector<std::string> patterns, double def, Domain domain,
                std::string unit) {
    InputSpec i;
    i.name = std::move(name);
    i.label = std::move(label);
    i.patterns = std::move(patterns);
    i.default_value = def;
    i.domain = domain;
    i.unit = std::move(unit);
    return i;
}

OutputSpec output(std::string name, std::string label, std::vector<std::string> patterns, std::string oracle) {
    OutputSpec o;
    o.name = std::move(name);
    o.label = std::move(label);
    o.patterns = std::move(patterns);
    o.oracle_text = std::move(oracle);
    return o;
}

ProblemSpec area(std::string id, std::string statement) {
    ProblemSpec s;
    s.id = std::move(id);
    s.statement = std::move(statement);
    s.inputs = {
        input("length", "Length (ft)", {"length", "long"}, 10, {0.1, 10000, false}, "ft"),
        input("width", "Width (ft)", {"width", "wide"}, 12, {0.1, 10000, false}, "ft"),
    };
    s.outputs = {output("square_footage", "Square Footage (sq ft)", {"square footage", "square feet", "area"},
                        "length*width")};
    s.compile();
    return s;
}

// Apples and snapplees share one model; only the nouns in the labels differ.
ProblemSpec spending(std::string id, std::string statement, std::string noun, std::string plural, Domain days) {
    ProblemSpec s;
    s.id = std::move(id);
    s.statement = std::move(statement);
    s.layout = Layout::DailyTableAllowed;
    InputSpec price = input("price", "Price per " + noun + " ($)", {"price"}, 2, {0.01, 1000, false}, "$");
    std::string lower = plural;
    for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    InputSpec qty = input("qty", plural + " Bought per Day", {lower + " bought", "number of " + lower, "quantity", lower},
                          2, {1, 1000, true}, "count");
    InputSpec d = input("days", "Number of Days", {"days", "number of days"}, 30, days, "days");
    d.row_count = true;
    s.inputs = {price, qty, d};

    OutputSpec daily = output("daily_cost", "Daily Cost ($)", {"daily cost", "daily spending", "cost per day"},
                              "price*qty");
    daily.per_row = true;
    OutputSpec total = output("total", "Total Spending ($)", {"total spending", "total cost", "total"},
                              "price*qty*days");
    total.aggregate_of = "daily_cost";
    s.outputs = {daily, total};
    s.compile();
    return s;
}

ProblemSpec wall() {
    ProblemSpec s;
    s.id = "wall_task";
    s.statement =
        "Suppose that you are working for a general contractor (“the original consulting firm”) who has "
        "asked you to build a spreadsheet model to help her to create a client bid to build a wall. According to "
        "your boss, you will start by offering two options—lava rock or brick. Both walls will be built by "
        "crews of two. Crews will work three, eight-hour days to build either type of wall. The wall will be 20 "
        "feet long, 6 feet tall and 2 feet thick. Wages will be $10 per hour per person. You will have to add 20% "
        "to wages to cover benefits. Lava Rock will cost $3 per cubic foot. Brick will cost $2 per cubic foot. "
        "Your bid must add a profit margin of 30% to your expected cost.";
    InputSpec benefit = input("benefit", "Benefit Rate", {"benefit", "benefits"}, 0.2, {0, 1, false}, "fraction of wages");
    benefit.rate = true;
    InputSpec margin = input("margin", "Profit Margin", {"profit margin", "margin"}, 0.3, {0, 1, false}, "fraction of cost");
    margin.rate = true;
    s.inputs = {
        input("length", "Wall Length (ft)", {"length", "long"}, 20, {1, 1000, false}, "ft"),
        input("height", "Wall Height (ft)", {"height", "tall", "high"}, 6, {1, 100, false}, "ft"),
        input("thickness", "Wall Thickness (ft)", {"thickness", "thick"}, 2, {0.1, 20, false}, "ft"),
        input("crew", "Crew Members", {"crew"}, 2, {1, 50, true}, "people"),
        input("hours", "Hours per Day", {"hours per day", "hours"}, 8, {1, 24, true}, "hours"),
        input("days", "Work Days", {"work days", "days"}, 3, {1, 365, true}, "days"),
        input("wage", "Hourly Wage ($)", {"hourly wage", "wage", "wages"}, 10, {0, 1000, false}, "$/hour"),
        benefit,
        input("lava_cost", "Lava Rock Cost ($/cu ft)", {"lava rock cost", "lava cost"}, 3, {0, 1000, false}, "$/cu ft"),
        input("brick_cost", "Brick Cost ($/cu ft)", {"brick cost"}, 2, {0, 1000, false}, "$/cu ft"),
        margin,
    };
    s.outputs = {
        output("volume", "Volume (cu ft)", {"volume"}, "length*height*thickness"),
        output("labor", "Labor Cost ($)", {"labor cost", "labour cost", "labor"}, "crew*hours*days*wage*(1+benefit)"),
        output("material_lava", "Lava Rock Material Cost ($)",
               {"lava rock material cost", "lava rock material", "lava material"}, "volume*lava_cost"),
        output("material_brick", "Brick Material Cost ($)", {"brick material cost", "brick material"},
               "volume*brick_cost"),
        output("total_lava", "Total Cost - Lava Rock ($)", {"total cost lava rock", "total lava"},
               "labor+material_lava"),
        output("total_brick", "Total Cost - Brick ($)", {"total cost brick", "total brick"}, "labor+material_brick"),
        output("bid_lava", "Bid Price - Lava Rock ($)", {"bid price lava rock", "bid lava"}, "total_lava*(1+margin)"),
        output("bid_brick", "Bid Price - Brick ($)", {"bid price brick", "bid brick"}, "total_brick*(1+margin)"),
    };
    s.compile();
    return s;
}

std::vector<CorpusEntry> make_corpus() {
    const Domain fixed30{30, 30, true};
    const Domain month{28, 31, true};
    std::vector<CorpusEntry> c;
    c.push_back({area("area_data",
                      "Calculate the square footage of a rectangular room that is 10 feet long and 12 feet wide."),
                 {"data"},
                 {}});
    c.push_back({area("area_params", "Calculate the square footage of a rectangular room given its length and width."),
                 {"parameters"},
                 {}});
    c.push_back({spending("apples_data",
                          "A man buys two apples every day for 30 consecutive days, spending $2 per apple. What is "
                          "total spending?",
                          "Apple", "Apples", fixed30),
                 {"data"},
                 {}});
    c.push_back({spending("apples_params",
                          "A man buys apples every day for 30 consecutive days. Given the price per apple and the "
                          "number of apples he buys daily, what is total spending?",
                          "Apple", "Apples", fixed30),
                 {"parameters"},
                 {"fig2_left"}});
    c.push_back({spending("apples_month_data",
                          "A man buys two apples every day for a month, spending $2 per apple. What is total "
                          "spending?",
                          "Apple", "Apples", month),
                 {"data", "month"},
                 {}});
    c.push_back({spending("apples_month_params",
                          "A man buys apples every day for a month. Given the price per apple and the number of "
                          "apples he buys daily, what is total spending?",
                          "Apple", "Apples", month),
                 {"parameters", "month"},
                 {"fig2_center"}});
    c.push_back({spending("snapplees_data",
                          "A man buys two snapplees every day for 30 consecutive days, spending $2 per snapplee. What "
                          "is total spending?",
                          "Snapplee", "Snapplees", fixed30),
                 {"data", "made-up-noun"},
                 {}});
    c.push_back({spending("snapplees_params",
                          "A man buys snapplees every day for 30 consecutive days. Given the price per snapplee and "
                          "the number of snapplees he buys daily, what is total spending?",
                          "Snapplee", "Snapplees", fixed30),
                 {"parameters", "made-up-noun"},
                 {}});
    c.push_back({wall(), {"data"}, {"fig3", "fig4", "fig5", "fig6"}});
    return c;
}

}  // namespace

const std::vector<CorpusEntry>& corpus() {
    static const std::vector<CorpusEntry> entries = make_corpus();
    return entries;
}

std::vector<ProblemSpec> builtin_specs() {
    std::vector<ProblemSpec> out;
    for (const auto& e : corpus()) out.push_back(e.spec);
    return out;
}

const ProblemSpec* find_spec(std::string_view id) {
    for (const auto& e : corpus())
        if (e.spec.id == id) return &e.spec;
    return nullptr;
}

}  // namespace erfr
