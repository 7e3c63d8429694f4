#include "support.hpp"

#include "erfr/audit.hpp"
#include "erfr/corpus.hpp"

#include <doctest.h>

#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

using namespace erfr;
using namespace erfr::test;

namespace {

ErfrReport audit_fixture(const std::string& id) {
    return audit(build_figure_fixture(id), find_spec(fixture_spec_id(id)), id);
}

std::vector<const Finding*> with_code(const ErfrReport& r, std::string_view code) {
    std::vector<const Finding*> out;
    for (const auto& f : r.findings)
        if (f.code == code) out.push_back(&f);
    return out;
}

std::size_t count(const ErfrReport& r, std::string_view code) { return with_code(r, code).size(); }

std::size_t fail_findings(const ErfrReport& r) {
    return std::count_if(r.findings.begin(), r.findings.end(), [](const Finding& f) { return f.severity == Severity::Fail; });
}

const Binding* binding(const ErfrReport& r, std::string_view name) {
    for (const auto& b : r.bindings)
        if (b.name == name) return &b;
    return nullptr;
}

void check_all(const ErfrReport& r, Verdict v) {
    for (int c = 0; c < 5; ++c) CHECK_MESSAGE(r.criteria[c] == v, to_string(Criterion(c)) << "\n" << report_text(r));
}

ProblemSpec volume_spec() {
    return spec_from_json(R"J({
      "id": "volume", "statement": "Wall volume.",
      "inputs": [
        {"name": "length", "label": "Length (ft)", "patterns": ["length"], "default": 20, "domain": {"min": 1, "max": 1000}},
        {"name": "height", "label": "Height (ft)", "patterns": ["height"], "default": 6, "domain": {"min": 1, "max": 100}},
        {"name": "thickness", "label": "Thickness (ft)", "patterns": ["thickness"], "default": 2, "domain": {"min": 0.1, "max": 20}}
      ],
      "outputs": [{"name": "volume", "label": "Volume (cu ft)", "patterns": ["volume"], "oracle": "length*height*thickness"}]
    })J");
}

// fig2_center with the daily-cost column made of formulas and no stray column.
Workbook corrected_fig2() {
    Workbook wb = build_figure_fixture("fig2_center");
    for (int r = 2; r <= 31; ++r) {
        wb.set_formula(CellAddr{"Sheet1", 4, r}, fmt::format("=B{0}*C{0}", r));
        wb.erase(CellAddr{"Sheet1", 5, r});
    }
    wb.erase(addr("D34"));
    wb.erase(addr("E34"));
    return wb;
}

// A daily table with `days` rows of price 2 and 2 apples.
Workbook daily_table(int days) {
    Workbook wb;
    wb.set_text(addr("A1"), "Day");
    wb.set_text(addr("B1"), "Price per Apple ($)");
    wb.set_text(addr("C1"), "Apples Bought");
    wb.set_text(addr("D1"), "Daily Cost ($)");
    for (int d = 1; d <= days; ++d) {
        int r = d + 1;
        wb.set_number(CellAddr{"Sheet1", 1, r}, d);
        wb.set_number(CellAddr{"Sheet1", 2, r}, 2);
        wb.set_number(CellAddr{"Sheet1", 3, r}, 2);
        wb.set_formula(CellAddr{"Sheet1", 4, r}, fmt::format("=B{0}*C{0}", r));
    }
    wb.set_text(CellAddr{"Sheet1", 3, days + 3}, "Total Spending:");
    wb.set_formula(CellAddr{"Sheet1", 4, days + 3}, fmt::format("=SUM(D2:D{})", days + 1));
    return wb;
}

}  // namespace

// ---- the golden fixture matrix -------------------------------------------------

TEST_CASE("fig4 passes everything") {
    ErfrReport r = audit_fixture("fig4");
    check_all(r, Verdict::Pass);
    CHECK(fail_findings(r) == 0);
    const Binding* length = binding(r, "length");
    REQUIRE(length);
    CHECK(length->cells == std::vector<CellAddr>{addr("B2")});
    CHECK(length->method == BindMethod::Label);
    const Binding* bid = binding(r, "bid_lava");
    REQUIRE(bid);
    CHECK(bid->cells == std::vector<CellAddr>{addr("D8")});
    CHECK(bid->confirmed);
    const Binding* benefit = binding(r, "benefit");
    REQUIRE(benefit);
    CHECK(benefit->encoding == Encoding::OnePlus);
    CHECK(r.metrics.perturbation_vectors == 3);
}

TEST_CASE("fig3 and fig5 have correct numbers but no formulas") {
    for (const char* id : {"fig3", "fig5"}) {
        CAPTURE(id);
        ErfrReport r = audit_fixture(id);
        CHECK(r.verdict(Criterion::R2) == Verdict::Fail);
        CHECK(count(r, codes::kOutputIsConstant) == 8);
        CHECK(count(r, codes::kNoFormulas) == 1);
        CHECK(r.verdict(Criterion::R5) == Verdict::Pass);
    }
}

TEST_CASE("fig2_center: constants, a stray column and unlabeled formulas") {
    ErfrReport r = audit_fixture("fig2_center");
    CHECK(r.verdict(Criterion::R2) == Verdict::Fail);
    auto constants = with_code(r, codes::kOutputIsConstant);
    REQUIRE(constants.size() == 30);
    for (int i = 0; i < 30; ++i) CHECK(constants[i]->cells == std::vector<CellAddr>{CellAddr{"Sheet1", 4, i + 2}});
    auto extra = with_code(r, codes::kExtraneousFormulaColumn);
    REQUIRE(extra.size() == 1);
    CHECK(extra[0]->severity == Severity::Warn);
    CHECK(extra[0]->cells.size() == 30);
    CHECK(extra[0]->cells.front() == addr("E2"));
    auto unlabeled = with_code(r, codes::kUnlabeledCell);
    REQUIRE(unlabeled.size() == 30);
    for (int i = 0; i < 30; ++i) CHECK(unlabeled[i]->cells.front() == CellAddr("Sheet1", 5, i + 2));
    CHECK(count(r, codes::kTotalAggregatesConstants) == 1);
    CHECK(r.verdict(Criterion::R4) == Verdict::Fail);
}

TEST_CASE("fig6: right shape, wrong numbers") {
    ErfrReport r = audit_fixture("fig6");
    CHECK(r.verdict(Criterion::R5) == Verdict::Fail);
    bool d16 = false;
    for (const Finding* f : with_code(r, codes::kWrongValue))
        if (f->cells == std::vector<CellAddr>{addr("D16")} && f->message.find("7200 vs 720") != std::string::npos)
            d16 = true;
    CHECK(d16);
    auto missing = with_code(r, codes::kMissingOutput);
    REQUIRE(missing.size() == 1);
    CHECK(missing[0]->message.find("'labor'") != std::string::npos);
    auto blanks = with_code(r, codes::kBlankPrecedent);
    std::vector<CellAddr> blank_cells;
    for (const Finding* f : blanks) blank_cells.push_back(f->cells.front());
    for (const char* a : {"C16", "C17", "B13"})
        CHECK(std::find(blank_cells.begin(), blank_cells.end(), addr(a)) != blank_cells.end());
    CHECK(count(r, codes::kHardwiredPercentConversion) == 2);
    CHECK(r.verdict(Criterion::R3) == Verdict::Warn);
    CHECK(count(r, codes::kOutputNotTracking) >= 1);
}

TEST_CASE("fig2_left is a correct parameterized table") {
    ErfrReport r = audit_fixture("fig2_left");
    check_all(r, Verdict::Pass);
    const Binding* days = binding(r, "days");
    REQUIRE(days);
    CHECK(days->method == BindMethod::RowCount);
}

// ---- binding -------------------------------------------------------------------

TEST_CASE("blank input cells bind and satisfy R1") {
    Workbook wb;
    wb.set_text(addr("A1"), "Room Dimensions");
    wb.set_text(addr("A2"), "Length (ft)");
    wb.set_text(addr("A3"), "Width (ft)");
    wb.set_text(addr("A4"), "Square Footage");
    wb.set_formula(addr("B4"), "=B2*B3");
    ErfrReport r = audit(wb, *find_spec("area_params"));
    CHECK(r.verdict(Criterion::R1) == Verdict::Pass);
    CHECK(r.verdict(Criterion::R5) == Verdict::Pass);
    CHECK(binding(r, "length")->cells == std::vector<CellAddr>{addr("B2")});
    CHECK(binding(r, "width")->cells == std::vector<CellAddr>{addr("B3")});
    CHECK(binding(r, "square_footage")->confirmed);
}

TEST_CASE("numbers typed into a formula are hardwired inputs") {
    Workbook wb;
    wb.set_text(addr("A1"), "Volume (cu ft)");
    wb.set_formula(addr("B1"), "=20*6*2");
    ErfrReport r = audit(wb, volume_spec());
    auto hw = with_code(r, codes::kInputHardwired);
    CHECK(hw.size() == 3);
    CHECK(count(r, codes::kInputNotFound) == 0);
    CHECK(r.verdict(Criterion::R1) == Verdict::Fail);
    CHECK(count(r, codes::kHardwiredNumber) == 3);
    CHECK(r.verdict(Criterion::R3) == Verdict::Fail);
}

TEST_CASE("a constant that equals the oracle binds by value and then fails") {
    Workbook wb;
    wb.set_text(addr("A1"), "Length (ft)");
    wb.set_number(addr("B1"), 10);
    wb.set_text(addr("A2"), "Width (ft)");
    wb.set_number(addr("B2"), 12);
    wb.set_text(addr("A3"), "Result");
    wb.set_number(addr("B3"), 120);
    ErfrReport r = audit(wb, *find_spec("area_params"));
    const Binding* out = binding(r, "square_footage");
    REQUIRE(out);
    CHECK(out->method == BindMethod::Value);
    CHECK(out->cells == std::vector<CellAddr>{addr("B3")});
    CHECK_FALSE(out->confirmed);
    CHECK(count(r, codes::kOutputIsConstant) == 1);
    CHECK(r.verdict(Criterion::R2) == Verdict::Fail);
}

TEST_CASE("a wrong-cell value match can be confirmed by perturbation") {
    Workbook wb;
    wb.set_text(addr("A1"), "Length (ft)");
    wb.set_number(addr("B1"), 10);
    wb.set_text(addr("A2"), "Width (ft)");
    wb.set_number(addr("B2"), 12);
    wb.set_text(addr("A3"), "Result");
    wb.set_formula(addr("B3"), "=B1*B2");
    ErfrReport r = audit(wb, *find_spec("area_params"));
    const Binding* out = binding(r, "square_footage");
    REQUIRE(out);
    CHECK(out->method == BindMethod::PerturbationConfirmed);
    CHECK(out->confirmed);
    CHECK(r.verdict(Criterion::R2) == Verdict::Pass);
}

TEST_CASE("the empty workbook misses every input and output") {
    Workbook wb;
    wb.add_sheet("Sheet1");
    const ProblemSpec& wall = *find_spec("wall_task");
    ErfrReport r = audit(wb, wall);
    CHECK(r.verdict(Criterion::R1) == Verdict::Fail);
    CHECK(r.verdict(Criterion::R2) == Verdict::Fail);
    CHECK(r.verdict(Criterion::R5) == Verdict::Fail);
    CHECK(count(r, codes::kInputNotFound) == wall.inputs.size());
    CHECK(count(r, codes::kMissingOutput) == wall.outputs.size());
}

TEST_CASE("structural audit of fig5") {
    ErfrReport r = audit(build_figure_fixture("fig5"), nullptr, "fig5");
    CHECK(r.mode == AuditMode::Structural);
    CHECK(r.verdict(Criterion::R2) == Verdict::Fail);
    CHECK(r.verdict(Criterion::R5) == Verdict::NotEvaluated);
    CHECK(count(r, codes::kNoFormulas) == 1);
    // NO_FORMULAS already says it all; orphans are not listed on top.
    CHECK(count(r, codes::kOrphanInput) == 0);
    CHECK(r.bindings.empty());

    Workbook extra = build_figure_fixture("fig4");
    extra.set_text(addr("A20"), "Unused Rate");
    extra.set_number(addr("B20"), 0.07);
    ErfrReport o = audit(extra, nullptr);
    auto orphans = with_code(o, codes::kOrphanInput);
    REQUIRE(orphans.size() == 1);
    CHECK(orphans[0]->cells == std::vector<CellAddr>{addr("B20")});

    ErfrReport f4 = audit(build_figure_fixture("fig4"), nullptr);
    for (int c = 0; c < 4; ++c) CHECK(f4.criteria[c] == Verdict::Pass);
}

// ---- individual checks -----------------------------------------------------------

TEST_CASE("hardwired literals") {
    Workbook wb;
    wb.set_text(addr("A1"), "Cost");
    wb.set_number(addr("B1"), 100);
    wb.set_text(addr("A2"), "Bid");
    wb.set_formula(addr("B2"), "=B1*1.3");
    auto f = check_hardwired(wb);
    REQUIRE(f.size() == 1);
    CHECK(f[0].code == codes::kHardwiredNumber);
    CHECK(f[0].severity == Severity::Fail);
    CHECK(f[0].message.find("1.3") != std::string::npos);

    CHECK(check_hardwired(build_figure_fixture("fig4")).empty());

    Workbook allowed;
    allowed.set_formula(addr("A1"), "=ROUND(B1*(1-B2),2)+0-(-1)");
    CHECK(check_hardwired(allowed).empty());

    Workbook pct;
    pct.set_formula(addr("A1"), "=B1*100");
    pct.set_formula(addr("A2"), "=100/B1");
    auto p = check_hardwired(pct);
    REQUIRE(p.size() == 2);
    CHECK(p[0].code == codes::kHardwiredPercentConversion);
    CHECK(p[1].code == codes::kHardwiredNumber);
}

TEST_CASE("labels") {
    CHECK(check_labels(build_figure_fixture("fig4"), build_graph(build_figure_fixture("fig4"))).empty());

    Workbook lone;
    lone.set_formula(addr("A1"), "=1+1");
    auto f = check_labels(lone, build_graph(lone));
    REQUIRE(f.size() == 1);
    CHECK(f[0].code == codes::kUnlabeledCell);

    // A heading above a run of formulas labels the whole run.
    Workbook column;
    column.set_text(addr("A1"), "Input");
    column.set_number(addr("A2"), 3);
    column.set_text(addr("B1"), "Doubled");
    column.set_formula(addr("B2"), "=A2*2");
    column.set_formula(addr("B3"), "=B2*2");
    CHECK(check_labels(column, build_graph(column)).empty());

    CHECK(label_tokens("Wall Length (ft)") == std::vector<std::string>{"wall", "length"});
    CHECK(label_tokens("Bid Price - Lava Rock ($)") == std::vector<std::string>{"bid", "price", "lava", "rock"});
    CHECK(label_tokens("Profit Margin [%]:") == std::vector<std::string>{"profit", "margin"});
}

TEST_CASE("label matching prefers exact labels") {
    Workbook wb = build_figure_fixture("fig4");
    auto tables = detect_tables(wb);
    CellLabel l = label_of(wb, addr("B2"), tables);
    CHECK(l.row == std::vector<std::string>{"wall", "length"});
    CHECK(match_label({"length"}, l).has_value());
    CHECK_FALSE(match_label({"height"}, l).has_value());
    auto labor = match_label({"labor", "cost"}, label_of(wb, addr("D3"), tables));
    auto hours = match_label({"hours"}, label_of(wb, addr("B6"), tables));
    REQUIRE(labor);
    REQUIRE(hours);
    CHECK(labor->coverage == 1.0);
    CHECK(hours->coverage == doctest::Approx(1.0 / 3));
    CHECK(*labor > *hours);
}

TEST_CASE("table detection") {
    auto tables = detect_tables(build_figure_fixture("fig2_center"));
    REQUIRE(tables.size() == 1);
    const TableRegion& t = tables[0];
    CHECK(t.header_row == 1);
    CHECK(t.first_row == 2);
    CHECK(t.body_rows() == 30);
    REQUIRE(t.columns.size() >= 4);
    CHECK(t.columns[0].header == "Day");
    CHECK(t.columns[1].header == "Price per Apple ($)");
    CHECK(t.columns[2].header == "Apples Bought");
    CHECK(t.columns[3].header == "Daily Cost ($)");
    CHECK(t.columns[3].kind == TableRegion::ColumnKind::Constant);
    REQUIRE(t.column(5));
    CHECK(t.column(5)->kind == TableRegion::ColumnKind::Formula);

    CHECK(detect_tables(build_figure_fixture("fig4")).empty());
    CHECK(detect_tables(Workbook{}).empty());
}

TEST_CASE("a corrected daily table has no table findings") {
    Workbook wb = corrected_fig2();
    const ProblemSpec& spec = *find_spec("apples_month_params");
    DependencyGraph g = build_graph(wb);
    InputBindings in = bind_inputs(wb, spec, g);
    OutputBindings out = bind_outputs(wb, spec, g, in);
    REQUIRE(in.table);
    CHECK(check_table_columns(*in.table, spec, wb, in, out).empty());

    // Brute-force oracle: every row is its own price times quantity.
    EvalResult v = evaluate(wb);
    for (int r = 2; r <= 31; ++r) {
        double price = *v.number(CellAddr{"Sheet1", 2, r});
        double qty = *v.number(CellAddr{"Sheet1", 3, r});
        CHECK(*v.number(CellAddr{"Sheet1", 4, r}) == price * qty);
    }
    check_all(audit(wb, spec), Verdict::Pass);
}

TEST_CASE("month-long tables of 30 or 31 days are both accepted") {
    const ProblemSpec& spec = *find_spec("apples_month_data");
    ErfrReport thirty = audit(build_reference_workbook(spec), spec);
    check_all(thirty, Verdict::Pass);
    Assignment out = eval_oracle(spec, default_assignment(spec));
    CHECK(out.at("total") == 120);

    ErfrReport t31 = audit(daily_table(31), spec);
    CHECK(t31.verdict(Criterion::R5) == Verdict::Pass);
    CHECK(t31.verdict(Criterion::R2) == Verdict::Pass);
    CHECK(*evaluate(daily_table(31)).number(addr("D34")) == 124);

    // 32 days is outside the month domain.
    ErfrReport t32 = audit(daily_table(32), spec);
    CHECK(count(t32, codes::kInputOutOfDomain) == 1);
    CHECK(t32.verdict(Criterion::R5) == Verdict::Fail);
}

TEST_CASE("table totals must aggregate the column") {
    const ProblemSpec& spec = *find_spec("apples_params");
    Workbook typed = daily_table(30);
    typed.set_number(addr("D33"), 120);
    ErfrReport r = audit(typed, spec);
    CHECK(count(r, codes::kTotalNotFormula) == 1);
    CHECK(r.verdict(Criterion::R2) == Verdict::Fail);

    Workbook partial = daily_table(30);
    partial.set_formula(addr("D33"), "=D2*30");
    r = audit(partial, spec);
    CHECK(count(r, codes::kTotalNotAggregating) == 1);

    Workbook shifted = daily_table(30);
    shifted.set_formula(addr("D5"), "=B6*C6");
    r = audit(shifted, spec);
    CHECK(count(r, codes::kRowReferenceMismatch) == 1);
}

TEST_CASE("structure findings") {
    Workbook wb;
    wb.set_text(addr("A1"), "Loop");
    wb.set_formula(addr("B1"), "=B2+1");
    wb.set_text(addr("A2"), "Back");
    wb.set_formula(addr("B2"), "=B1");
    wb.set_text(addr("A3"), "Elsewhere");
    wb.set_formula(addr("B3"), "=Other!A1");
    wb.set_text(addr("A4"), "Lookup");
    wb.set_formula(addr("B4"), "=VLOOKUP(1,B1:B2,1)");
    wb.set_text(addr("A5"), "Broken");
    wb.set_formula(addr("B5"), "=SUM(B1:");
    ErfrReport r = audit(wb, nullptr);
    CHECK(count(r, codes::kCircularReference) == 1);
    CHECK(count(r, codes::kFormulaParseError) == 1);
    CHECK(count(r, codes::kUnsupportedFunction) == 1);
    CHECK(count(r, codes::kBrokenReference) + count(r, codes::kUnsupportedRef) >= 1);
    CHECK(r.verdict(Criterion::R2) == Verdict::Fail);
}

TEST_CASE("duplicate inputs warn") {
    Workbook wb = build_figure_fixture("fig4");
    wb.set_text(addr("F2"), "Wall Length (ft)");
    wb.set_number(addr("G2"), 20);
    wb.set_formula(addr("H2"), "=G2*1");
    ErfrReport r = audit(wb, *find_spec("wall_task"));
    CHECK(count(r, codes::kDuplicateInput) == 1);
    CHECK(r.verdict(Criterion::R1) == Verdict::Warn);
}

// ---- registry and reports -------------------------------------------------------

TEST_CASE("finding registry") {
    for (const auto& k : finding_kinds()) {
        Finding f = make_finding(k.code, {}, "m");
        CHECK(f.criterion == k.criterion);
        CHECK(f.severity == k.severity);
    }
    CHECK(finding_kind("UNLABELED_CELL")->criterion == Criterion::R4);
    CHECK(finding_kind("DUPLICATE_INPUT")->severity == Severity::Warn);
    CHECK(finding_kind("FILE_CORRUPT_NOT_ZIP")->criterion == Criterion::R1);
    CHECK_FALSE(finding_kind("NOT_A_CODE"));
}

TEST_CASE("failed-load reports fail every criterion") {
    ErfrReport r = failed_load_report("x.xlsx", AuditMode::Spec, "FILE_CORRUPT_NOT_ZIP", "bad");
    check_all(r, Verdict::Fail);
    CHECK(r.findings.size() == 1);
    ErfrReport s = failed_load_report("x.xlsx", AuditMode::Structural, "NO_FILE_PRODUCED", "none");
    CHECK(s.verdict(Criterion::R5) == Verdict::NotEvaluated);
}

TEST_CASE("report JSON round trips") {
    for (const auto& id : fixture_ids()) {
        ErfrReport r = audit_fixture(id);
        CHECK(report_from_json(report_json(r)) == r);
        ErfrReport s = audit(build_figure_fixture(id), nullptr, id);
        CHECK(report_from_json(report_json(s, -1)) == s);
    }
}

TEST_CASE("warnings only fail in strict mode") {
    ErfrReport r = audit_fixture("fig4");
    CHECK_FALSE(r.failed());
    r.criteria[2] = Verdict::Warn;
    CHECK_FALSE(r.failed());
    CHECK(r.failed(true));
}

// ---- properties -------------------------------------------------------------------

TEST_CASE("property: adding a fail finding never improves a verdict") {
    std::mt19937_64 rng(17);
    const auto& kinds = finding_kinds();
    auto rank = [](Verdict v) { return v == Verdict::Pass ? 0 : v == Verdict::Warn ? 1 : v == Verdict::Fail ? 2 : -1; };
    for (int i = 0; i < 500; ++i) {
        std::vector<Finding> fs;
        int n = int(rng() % 6);
        for (int k = 0; k < n; ++k) fs.push_back(make_finding(kinds[rng() % kinds.size()].code, {}, ""));
        for (AuditMode mode : {AuditMode::Spec, AuditMode::Structural}) {
            auto before = aggregate_verdicts(fs, mode);
            std::vector<const FindingKind*> fails;
            for (const auto& k : kinds)
                if (k.severity == Severity::Fail) fails.push_back(&k);
            auto more = fs;
            more.push_back(make_finding(fails[rng() % fails.size()]->code, {}, ""));
            auto after = aggregate_verdicts(more, mode);
            for (int c = 0; c < 5; ++c) CHECK(rank(after[c]) >= rank(before[c]));
        }
    }
}

TEST_CASE("property: audits are deterministic") {
    std::vector<std::pair<Workbook, const ProblemSpec*>> cases;
    for (const auto& id : fixture_ids()) cases.emplace_back(build_figure_fixture(id), find_spec(fixture_spec_id(id)));
    for (const auto& s : corpus()) cases.emplace_back(build_reference_workbook(s.spec), &s.spec);
    for (const auto& [wb, spec] : cases) {
        ErfrReport a = audit(wb, spec);
        ErfrReport b = audit(wb, spec);
        CHECK(a == b);
        CHECK(report_json(a) == report_json(b));
        ErfrReport reloaded = audit(read_workbook(write_workbook(wb)), spec);
        CHECK(report_json(reloaded) == report_json(a));
    }
}

TEST_CASE("property: reference workbooks are confirmed on every output") {
    for (const auto& e : corpus()) {
        ErfrReport r = audit(build_reference_workbook(e.spec), e.spec);
        check_all(r, Verdict::Pass);
        CHECK(r.findings.empty());
        for (const auto& b : r.bindings)
            if (!b.is_input) CHECK_MESSAGE(b.confirmed, e.spec.id << "." << b.name);
    }
}

TEST_CASE("property: distant cells do not change R4") {
    std::mt19937_64 rng(3);
    for (const auto& id : fixture_ids()) {
        Workbook base = build_figure_fixture(id);
        const ProblemSpec* spec = find_spec(fixture_spec_id(id));
        ErfrReport before = audit(base, spec);
        DependencyGraph g = build_graph(base);
        // Cells that R4 looks at: formulas, inputs and virtual blanks.
        std::vector<CellAddr> watched;
        for (const auto& f : g.formula_nodes()) watched.push_back(f);
        for (const Cell* c : base.cells())
            if (!c->is_formula() && !g.dependents(c->addr).empty()) watched.push_back(c->addr);
        for (const auto& v : g.virtual_blanks()) watched.push_back(v);
        auto r4 = [](const ErfrReport& r) {
            std::vector<Finding> out;
            for (const auto& f : r.findings)
                if (f.criterion == Criterion::R4) out.push_back(f);
            return out;
        };
        for (int i = 0; i < 25; ++i) {
            CellAddr spot{"Sheet1", 1 + int(rng() % 12), 1 + int(rng() % 40)};
            bool far = base.find(spot) == nullptr &&
                       std::all_of(watched.begin(), watched.end(), [&](const CellAddr& w) {
                           return std::abs(w.row - spot.row) > 1 || std::abs(w.col - spot.col) > 1;
                       });
            if (!far) continue;
            Workbook wb = base;
            if (rng() % 2) wb.set_text(spot, "note");
            else wb.set_number(spot, 42);
            ErfrReport after = audit(wb, spec);
            CHECK_MESSAGE(after.verdict(Criterion::R4) == before.verdict(Criterion::R4), id << " " << spot.a1());
            CHECK_MESSAGE(r4(after) == r4(before), id << " " << spot.a1());
        }
    }
}

TEST_CASE("perturbation vectors stay in domain") {
    for (const auto& e : corpus()) {
        Assignment base = default_assignment(e.spec);
        auto vs = perturbation_vectors(e.spec, base);
        REQUIRE(vs.size() == 3);
        for (const auto& v : vs)
            for (const auto& in : e.spec.inputs) CHECK(in.domain.contains(v.at(in.name)));
    }
    const ProblemSpec& wall = *find_spec("wall_task");
    auto vs = perturbation_vectors(wall, default_assignment(wall));
    CHECK(vs[0].at("length") == 30);
    CHECK(vs[1].at("length") == 15);
    CHECK(vs[2].at("crew") == 9);
    CHECK(vs[2].at("length") == 20);
}

TEST_CASE("every finding code is documented") {
    std::ifstream in(std::string(ERFR_DOCS_DIR) + "/findings.md");
    REQUIRE(in);
    std::stringstream doc;
    doc << in.rdbuf();
    for (const auto& k : finding_kinds()) {
        std::string row = fmt::format("| `{}` | {} | {} |", k.code, to_string(k.criterion), to_string(k.severity));
        CHECK_MESSAGE(doc.str().find(row) != std::string::npos, row);
    }
}
