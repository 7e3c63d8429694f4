#include "support.hpp"

#include "erfr/corpus.hpp"
#include "erfr/recalc.hpp"

#include <doctest.h>

#include <fmt/format.h>

#include <random>
#include <set>

using namespace erfr;
using namespace erfr::test;

namespace {

double num(const EvalResult& r, const char* a) {
    auto v = r.number(addr(a));
    REQUIRE_MESSAGE(v.has_value(), a << " is " << display(r.value(addr(a))));
    return *v;
}

CellValue value_of(std::string_view formula) {
    Workbook wb;
    wb.set_number(addr("A1"), 1);
    wb.set_number(addr("A2"), 2);
    wb.set_number(addr("A3"), 3.5);
    wb.set_text(addr("A4"), "text");
    wb.set_value(addr("A5"), true);
    wb.set_formula(addr("C1"), std::string(formula));
    return evaluate(wb).value(addr("C1"));
}

double number_of_formula(std::string_view formula) {
    auto v = value_of(formula);
    REQUIRE_MESSAGE(is_number(v), formula << " gave " << display(v));
    return std::get<double>(v);
}

std::string error_of(std::string_view formula) {
    auto v = value_of(formula);
    REQUIRE_MESSAGE(is_error(v), formula << " gave " << display(v));
    return std::get<ErrorValue>(v).code;
}

// Layered random DAG: constants in column A, formula layers to the right,
// each formula reading only from earlier columns.
Workbook random_dag(std::mt19937_64& rng) {
    Workbook wb;
    std::uniform_int_distribution<int> rows(3, 8);
    int n = rows(rng);
    for (int r = 1; r <= n; ++r) wb.set_number(CellAddr{"Sheet1", 1, r}, double(rng() % 50) - 10);
    static constexpr const char* ops[] = {"+", "-", "*", "/"};
    for (int col = 2; col <= 5; ++col)
        for (int r = 1; r <= n; ++r) {
            auto ref = [&] {
                int c = 1 + int(rng() % (col - 1));
                int rr = 1 + int(rng() % n);
                return column_name(c) + std::to_string(rr);
            };
            std::string f;
            switch (rng() % 4) {
                case 0: f = fmt::format("={}{}{}", ref(), ops[rng() % 4], ref()); break;
                case 1: f = fmt::format("=SUM(A1:{}{})", column_name(col - 1), n); break;
                case 2: f = fmt::format("=IF({}>{},{},{}*2)", ref(), ref(), ref(), ref()); break;
                default: f = fmt::format("=ROUND({}/3,2)+MAX({},{})", ref(), ref(), ref()); break;
            }
            wb.set_formula(CellAddr{"Sheet1", col, r}, f);
        }
    return wb;
}

std::set<CellAddr> transitive_precedents(const DependencyGraph& g, const CellAddr& a) {
    std::set<CellAddr> seen;
    std::vector<CellAddr> stack{a};
    while (!stack.empty()) {
        CellAddr c = stack.back();
        stack.pop_back();
        if (!g.is_formula(c)) continue;
        for (const auto& p : g.precedents(c))
            if (seen.insert(p).second) stack.push_back(p);
    }
    return seen;
}

}  // namespace

TEST_CASE("fig4 evaluates to the printed wall-task numbers") {
    EvalResult r = evaluate(build_figure_fixture("fig4"));
    // Hand arithmetic: 20*6*2, 2*8*3*10*1.2, 240*3, 240*2, sums and 30% markup.
    CHECK(rel_close(num(r, "D2"), 240));
    CHECK(rel_close(num(r, "D3"), 576));
    CHECK(rel_close(num(r, "D4"), 720));
    CHECK(rel_close(num(r, "D5"), 480));
    CHECK(rel_close(num(r, "D6"), 1296));
    CHECK(rel_close(num(r, "D7"), 1056));
    CHECK(rel_close(num(r, "D8"), 1684.8));
    CHECK(rel_close(num(r, "D9"), 1372.8));
}

TEST_CASE("overriding wall length to 40 follows the formulas") {
    EvalResult r = evaluate(build_figure_fixture("fig4"), Overrides{{addr("B2"), 40.0}});
    // 40*6*2 = 480; lava total = 576 + 480*3 = 2016; bid = 2016*1.3 = 2620.8.
    CHECK(rel_close(num(r, "D2"), 480));
    CHECK(rel_close(num(r, "D4"), 1440));
    CHECK(rel_close(num(r, "D6"), 2016));
    CHECK(rel_close(num(r, "D8"), 2620.8));
    CHECK(rel_close(num(r, "D3"), 576));  // labor does not depend on length
}

TEST_CASE("fig2_center's total ignores price changes") {
    Workbook wb = build_figure_fixture("fig2_center");
    double before = num(evaluate(wb), "D33");
    double after = num(evaluate(wb, Overrides{{addr("B2"), 99.0}, {addr("B3"), 0.01}}), "D33");
    CHECK(before == after);
    double sum = 0;
    for (int r = 2; r <= 31; ++r) sum += std::get<double>(wb.constant_at(CellAddr{"Sheet1", 4, r}));
    CHECK(rel_close(before, sum));
}

TEST_CASE("dependency graph of the fixtures") {
    DependencyGraph g4 = build_graph(build_figure_fixture("fig4"));
    std::vector<CellAddr> d2{addr("B2"), addr("B3"), addr("B4")};
    CHECK(g4.precedents(addr("D2")) == d2);
    const auto& deps = g4.dependents(addr("B2"));
    CHECK(std::find(deps.begin(), deps.end(), addr("D2")) != deps.end());
    CHECK(g4.diagnostics().empty());
    CHECK(g4.edge_count() == 3 + 5 + 2 + 2 + 2 + 2 + 2 + 2);

    DependencyGraph g6 = build_graph(build_figure_fixture("fig6"));
    bool blank_b13 = false;
    for (const auto& d : g6.diagnostics())
        if (d.code == Diagnostic::Code::BlankPrecedent && d.addr == addr("F16") && d.related == addr("B13"))
            blank_b13 = true;
    CHECK(blank_b13);
    CHECK(g6.virtual_blanks().count(addr("C16")) == 1);

    DependencyGraph g3 = build_graph(build_figure_fixture("fig3"));
    CHECK(g3.edge_count() == 0);
    CHECK(g3.formula_nodes().empty());
}

TEST_CASE("cycle detection") {
    Workbook two;
    two.set_formula(addr("A1"), "=B1+1");
    two.set_formula(addr("B1"), "=A1");
    auto cycles = detect_cycles(build_graph(two));
    REQUIRE(cycles.size() == 1);
    CHECK(cycles[0] == std::vector<CellAddr>{addr("A1"), addr("B1")});
    EvalResult r = evaluate(two);
    CHECK(identical(r.value(addr("A1")), CellValue{errors::kCycle}));
    CHECK(identical(r.value(addr("B1")), CellValue{errors::kCycle}));

    Workbook self;
    self.set_formula(addr("A1"), "=A1");
    cycles = detect_cycles(build_graph(self));
    REQUIRE(cycles.size() == 1);
    CHECK(cycles[0] == std::vector<CellAddr>{addr("A1")});

    CHECK(detect_cycles(build_graph(build_figure_fixture("fig4"))).empty());

    // Two separate cycles come back sorted, each starting at its smallest cell.
    Workbook both;
    both.set_formula(addr("C5"), "=D5");
    both.set_formula(addr("D5"), "=C5");
    both.set_formula(addr("B2"), "=A3");
    both.set_formula(addr("A3"), "=B2");
    both.set_formula(addr("E1"), "=1");
    cycles = detect_cycles(build_graph(both));
    REQUIRE(cycles.size() == 2);
    CHECK(cycles[0].front() == addr("B2"));
    CHECK(cycles[1].front() == addr("C5"));
}

TEST_CASE("built-in functions") {
    CHECK(number_of_formula("=SUM(A1:A3)") == 6.5);
    CHECK(number_of_formula("=SUM(A1:A5)") == 6.5);  // text and booleans in ranges are skipped
    CHECK(number_of_formula("=AVERAGE(A1:A3)") == doctest::Approx(6.5 / 3));
    CHECK(number_of_formula("=MIN(A1:A3,-4)") == -4);
    CHECK(number_of_formula("=MAX(A1:A3)") == 3.5);
    CHECK(number_of_formula("=COUNT(A1:A5)") == 3);
    CHECK(number_of_formula("=PRODUCT(A1:A3)") == 7);
    CHECK(number_of_formula("=IF(A1>A2,10,20)") == 20);
    CHECK(number_of_formula("=IF(A5,1,2)") == 1);
    CHECK(number_of_formula("=ROUND(2.5,0)") == 3);
    CHECK(number_of_formula("=ROUND(-2.5,0)") == -3);
    CHECK(number_of_formula("=ROUND(1684.845,2)") == 1684.85);
    CHECK(number_of_formula("=B9+1") == 1);  // blank counts as zero
    CHECK(error_of("=1/0") == "#DIV/0!");
    CHECK(error_of("=A4*2") == "#VALUE!");
    CHECK(error_of("=AVERAGE(B1:B3)") == "#DIV/0!");
    CHECK(error_of("=10^400") == "#NUM!");
    CHECK(error_of("=#REF!+1") == "#REF!");
    CHECK(error_of("=VLOOKUP(1,A1:A3,1)") == "#NAME?");
    auto text = value_of("=\"Total: \"&A1");
    CHECK(identical(text, CellValue{std::string("Total: 1")}));
    auto cmp = value_of("=\"ABC\"=\"abc\"");
    CHECK(identical(cmp, CellValue{true}));
}

TEST_CASE("unsupported functions and broken references become diagnostics") {
    Workbook wb;
    wb.set_formula(addr("A1"), "=VLOOKUP(1,B1:B3,1)");
    wb.set_formula(addr("A2"), "=Other!A1");
    wb.set_formula(addr("A3"), "=SUM(B1:");
    DependencyGraph g = build_graph(wb);
    std::set<Diagnostic::Code> codes;
    for (const auto& d : g.diagnostics()) codes.insert(d.code);
    CHECK(codes.count(Diagnostic::Code::UnsupportedFunction) == 1);
    CHECK(codes.count(Diagnostic::Code::ParseError) == 1);
    CHECK((codes.count(Diagnostic::Code::BrokenReference) + codes.count(Diagnostic::Code::CrossSheetReference)) >= 1);
    EvalResult r = evaluate(wb);
    CHECK(is_error(r.value(addr("A1"))));
    CHECK(is_error(r.value(addr("A3"))));
}

TEST_CASE("blank precedents read as zero, as in fig6") {
    EvalResult r = evaluate(build_figure_fixture("fig6"));
    CHECK(num(r, "D16") == 7200);  // =B12*B2*B3*B4 with B12 = 30
    CHECK(num(r, "E16") == 7200);  // =C16+D16, C16 empty
    CHECK(num(r, "F16") == 7200);  // =E16*(1+B13/100), B13 empty
    CHECK(num(r, "E17") == 480);
}

TEST_CASE("overrides cannot replace formulas") {
    Workbook wb = build_figure_fixture("fig4");
    CHECK_THROWS_AS(evaluate(wb, Overrides{{addr("D2"), 1.0}}), OverrideTargetsFormula);
    // Overriding an empty cell is allowed: that is how blank inputs are filled.
    EvalResult r = evaluate(build_figure_fixture("fig6"), Overrides{{addr("C16"), 576.0}});
    CHECK(num(r, "E16") == 7776);
}

TEST_CASE("property: evaluation order does not matter") {
    std::mt19937_64 rng(99);
    std::vector<Workbook> books;
    for (const auto& id : fixture_ids()) books.push_back(build_figure_fixture(id));
    for (int i = 0; i < 40; ++i) books.push_back(random_dag(rng));
    for (const auto& wb : books) {
        EvalResult base = evaluate(wb);
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            EvalOptions opts;
            opts.shuffle_seed = seed;
            REQUIRE(evaluate(wb, opts) == base);
        }
    }
}

TEST_CASE("property: empty overrides, repeated evaluation and locality") {
    std::mt19937_64 rng(5);
    std::vector<Workbook> books;
    for (const auto& id : fixture_ids()) books.push_back(build_figure_fixture(id));
    for (int i = 0; i < 20; ++i) books.push_back(random_dag(rng));
    for (const auto& wb : books) {
        EvalResult base = evaluate(wb);
        CHECK(evaluate(wb, Overrides{}) == base);
        CHECK(evaluate(wb) == base);

        DependencyGraph g = build_graph(wb);
        std::vector<CellAddr> constants;
        for (const Cell* c : wb.cells())
            if (!c->is_formula() && is_number(*c->constant())) constants.push_back(c->addr);
        for (const auto& f : g.formula_nodes()) {
            auto pre = transitive_precedents(g, f);
            for (const auto& c : constants) {
                if (pre.count(c)) continue;
                EvalResult moved = evaluate(wb, Overrides{{c, 123456.0}});
                REQUIRE_MESSAGE(identical(moved.value(f), base.value(f)),
                                f.a1() << " changed when unrelated " << c.a1() << " moved");
            }
        }
    }
}

TEST_CASE("fingerprints") {
    Workbook fig4 = build_figure_fixture("fig4");
    Fingerprint a = fingerprint(fig4);
    Fingerprint b = fingerprint(read_workbook(write_workbook(fig4)));
    CHECK(a.digest == b.digest);
    CHECK(a.dump == b.dump);
    CHECK(a.hex().size() == 16);

    CHECK(fingerprint(build_figure_fixture("fig3")).digest != fingerprint(build_figure_fixture("fig5")).digest);

    Workbook changed = fig4;
    changed.set_number(addr("B2"), 21);
    CHECK(fingerprint(changed).digest != a.digest);

    // One dump line per cell.
    CHECK(std::count(a.dump.begin(), a.dump.end(), '\n') == static_cast<long>(fig4.cell_count()));
    CHECK(a.dump.find("Sheet1!D2\tF\t=B2*B3*B4") != std::string::npos);
}
