#include "erfr/corpus.hpp"

#include <fmt/format.h>

namespace erfr {
namespace {

// Daily purchases of the month-long apple run: price, apples bought, daily cost.
struct Day {
    double price;
    double apples;
    double cost;
};
constexpr Day kApplesMonth[] = {
    {0.79, 4, 3.16},  {0.94, 12, 11.28}, {0.84, 3, 2.52},  {0.79, 8, 6.32},  {0.68, 13, 8.84}, {0.88, 3, 2.64},
    {0.69, 1, 0.69},  {1.1, 1, 1.1},     {1.17, 5, 5.85},  {0.65, 6, 3.9},   {1.01, 6, 6.06},  {0.78, 7, 5.46},
    {0.81, 9, 7.29},  {1.13, 5, 5.65},   {0.36, 2, 0.72},  {0.38, 5, 1.9},   {0.32, 10, 3.2},  {1.05, 11, 11.55},
    {1, 11, 11},      {1.08, 9, 9.72},   {1.18, 2, 2.36},  {1.02, 2, 2.04},  {0.72, 8, 5.76},  {1, 10, 10},
    {0.41, 10, 4.1},  {0.88, 4, 3.52},   {0.43, 7, 3.01},  {1.15, 8, 9.2},   {0.77, 12, 9.24}, {0.67, 3, 2.01},
};

CellAddr at(std::string_view a1) { return addr(a1); }

void row(Workbook& wb, int r, std::initializer_list<std::pair<int, CellValue>> cells) {
    for (const auto& [col, v] : cells) wb.set_value(CellAddr{std::string(kDefaultSheet), col, r}, v);
}

void apple_headers(Workbook& wb) {
    wb.set_text(at("A1"), "Day");
    wb.set_text(at("B1"), "Price per Apple ($)");
    wb.set_text(at("C1"), "Apples Bought");
    wb.set_text(at("D1"), "Daily Cost ($)");
}

// Left panel: a daily table whose price and quantity columns are left empty
// for the user, with the daily cost computed per row.
Workbook fig2_left() {
    Workbook wb;
    apple_headers(wb);
    for (int d = 1; d <= 30; ++d) {
        int r = d + 1;
        wb.set_number(CellAddr{"Sheet1", 1, r}, d);
        wb.set_formula(CellAddr{"Sheet1", 4, r}, fmt::format("=B{0}*C{0}", r));
    }
    wb.set_text(at("C33"), "Total Spending:");
    wb.set_formula(at("D33"), "=SUM(D2:D31)");
    return wb;
}

Workbook fig2_center() {
    Workbook wb;
    apple_headers(wb);
    for (int d = 1; d <= 30; ++d) {
        int r = d + 1;
        const Day& day = kApplesMonth[d - 1];
        row(wb, r, {{1, double(d)}, {2, day.price}, {3, day.apples}, {4, day.cost}});
        // The daily-cost formula, one column to the right of where it belongs.
        wb.set_formula(CellAddr{"Sheet1", 5, r}, fmt::format("=C{0}*D{0}", r));
    }
    wb.set_text(at("C33"), "Total Spending:");
    wb.set_formula(at("D33"), "=SUM(D2:D31)");
    wb.set_text(at("D34"), "Total Spending:");
    wb.set_formula(at("E34"), "=SUM(E2:E31)");
    return wb;
}

Workbook fig3() {
    Workbook wb;
    row(wb, 1,
        {{1, "Material"},
         {2, "Volume (cu ft)"},
         {3, "Labor Cost ($)"},
         {4, "Material Cost ($)"},
         {5, "Total Cost ($)"},
         {6, "Bid Price ($)"}});
    row(wb, 2, {{1, "Lava Rock"}, {2, 240.0}, {3, 576.0}, {4, 720.0}, {5, 1296.0}, {6, 1684.8}});
    row(wb, 3, {{1, "Brick"}, {2, 240.0}, {3, 576.0}, {4, 480.0}, {5, 1056.0}, {6, 1372.8}});
    return wb;
}

Workbook fig4() {
    Workbook wb;
    wb.set_text(at("A1"), "INPUTS");
    wb.set_text(at("C1"), "OUTPUTS");
    const std::pair<const char*, double> inputs[] = {
        {"Wall Length (ft)", 20},       {"Wall Height (ft)", 6},          {"Wall Thickness (ft)", 2},
        {"Crew Members", 2},            {"Hours per Day", 8},             {"Work Days", 3},
        {"Hourly Wage ($)", 10},        {"Benefits Multiplier", 1.2},     {"Lava Rock Cost ($/cu ft)", 3},
        {"Brick Cost ($/cu ft)", 2},    {"Profit Margin", 0.3},
    };
    int r = 2;
    for (const auto& [label, v] : inputs) row(wb, r++, {{1, label}, {2, v}});
    const std::pair<const char*, const char*> outputs[] = {
        {"Volume (cu ft)", "=B2*B3*B4"},
        {"Labor Cost ($)", "=B5*B6*B7*B8*B9"},
        {"Lava Rock Material Cost ($)", "=D2*B10"},
        {"Brick Material Cost ($)", "=D2*B11"},
        {"Total Cost - Lava Rock ($)", "=D3+D4"},
        {"Total Cost - Brick ($)", "=D3+D5"},
        {"Bid Price - Lava Rock ($)", "=D6*(1+B12)"},
        {"Bid Price - Brick ($)", "=D7*(1+B12)"},
    };
    r = 2;
    for (const auto& [label, formula] : outputs) {
        wb.set_text(CellAddr{"Sheet1", 3, r}, label);
        wb.set_formula(CellAddr{"Sheet1", 4, r}, formula);
        ++r;
    }
    return wb;
}

Workbook fig5() {
    Workbook wb;
    wb.set_text(at("A1"), "Wall Construction Bid Estimate");
    row(wb, 2,
        {{1, "Wall Type"},
         {2, "Volume (cu ft)"},
         {3, "Labor Cost"},
         {4, "Material Cost"},
         {5, "Total Cost (No Profit)"},
         {6, "Bid Price (with 30% profit)"}});
    row(wb, 3, {{1, "Lava Rock"}, {2, 240.0}, {3, 576.0}, {4, 720.0}, {5, 1296.0}, {6, 1684.8}});
    row(wb, 4, {{1, "Brick"}, {2, 240.0}, {3, 576.0}, {4, 480.0}, {5, 1056.0}, {6, 1372.8}});
    return wb;
}

Workbook fig6() {
    Workbook wb;
    wb.set_text(at("A1"), "INPUTS");
    const std::pair<const char*, double> inputs[] = {
        {"Wall Length (ft)", 20},   {"Wall Height (ft)", 6},  {"Wall Thickness (ft)", 2},
        {"Hourly Wage ($)", 10},    {"Crew Size", 2},         {"Work Days", 3},
        {"Hours per Day", 8},       {"Benefit Rate (%)", 20}, {"Lava Rock Cost ($/cu ft)", 3},
        {"Brick Cost ($/cu ft)", 2}, {"Profit Margin (%)", 30},
    };
    int r = 2;
    for (const auto& [label, v] : inputs) row(wb, r++, {{1, label}, {2, v}});
    row(wb, 15,
        {{1, "Wall Type"},
         {2, "Volume (cu ft)"},
         {3, "Labor Cost"},
         {4, "Material Cost"},
         {5, "Total Cost (No Profit)"},
         {6, "Bid Price (with Profit)"}});
    wb.set_text(at("A16"), "Lava Rock");
    wb.set_formula(at("B16"), "=B2*B3*B4");
    wb.set_formula(at("D16"), "=B12*B2*B3*B4");
    wb.set_formula(at("E16"), "=C16+D16");
    wb.set_formula(at("F16"), "=E16*(1+B13/100)");
    wb.set_text(at("A17"), "Brick");
    wb.set_formula(at("B17"), "=B2*B3*B4");
    wb.set_formula(at("D17"), "=B11*B2*B3*B4");
    wb.set_formula(at("E17"), "=C17+D17");
    wb.set_formula(at("F17"), "=E17*(1+B13/100)");
    return wb;
}

struct FixtureDef {
    std::string_view id;
    std::string_view spec;
    Workbook (*build)();
};
constexpr FixtureDef kFixtures[] = {
    {"fig2_left", "apples_params", fig2_left},
    {"fig2_center", "apples_month_params", fig2_center},
    {"fig3", "wall_task", fig3},
    {"fig4", "wall_task", fig4},
    {"fig5", "wall_task", fig5},
    {"fig6", "wall_task", fig6},
};

}  // namespace

const std::vector<std::string>& fixture_ids() {
    static const std::vector<std::string> ids = [] {
        std::vector<std::string> v;
        for (const auto& f : kFixtures) v.emplace_back(f.id);
        return v;
    }();
    return ids;
}

Workbook build_figure_fixture(std::string_view id) {
    for (const auto& f : kFixtures)
        if (f.id == id) return f.build();
    throw UnknownFixtureId(std::string(id));
}

std::string fixture_spec_id(std::string_view id) {
    for (const auto& f : kFixtures)
        if (f.id == id) return std::string(f.spec);
    throw UnknownFixtureId(std::string(id));
}

}  // namespace erfr
