#include "internal.hpp"

#include <algorithm>
#include <fmt/format.h>

namespace erfr {

std::string_view to_string(Criterion c) {
    static constexpr std::string_view names[] = {"R1", "R2", "R3", "R4", "R5"};
    return names[static_cast<int>(c)];
}

std::string_view to_string(Severity s) {
    switch (s) {
        case Severity::Info: return "info";
        case Severity::Warn: return "warn";
        case Severity::Fail: return "fail";
    }
    return "?";
}

std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "Pass";
        case Verdict::Warn: return "Warn";
        case Verdict::Fail: return "Fail";
        case Verdict::NotEvaluated: return "NotEvaluated";
    }
    return "?";
}

std::string_view to_string(AuditMode m) { return m == AuditMode::Spec ? "spec" : "structural"; }

std::string_view to_string(BindMethod m) {
    switch (m) {
        case BindMethod::Label: return "label";
        case BindMethod::Value: return "value";
        case BindMethod::PerturbationConfirmed: return "perturbation-confirmed";
        case BindMethod::TableColumn: return "table-column";
        case BindMethod::RowCount: return "row-count";
        case BindMethod::Default: return "default";
    }
    return "?";
}

const std::vector<FindingKind>& finding_kinds() {
    using C = Criterion;
    using S = Severity;
    static const std::vector<FindingKind> kinds = {
        {codes::kInputNotFound, C::R1, S::Fail},
        {codes::kInputHardwired, C::R1, S::Fail},
        {codes::kDuplicateInput, C::R1, S::Warn},
        {codes::kNoInputCells, C::R1, S::Fail},
        {"FILE_CORRUPT_NOT_ZIP", C::R1, S::Fail},
        {"FILE_CORRUPT_MISSING_PART", C::R1, S::Fail},
        {"FILE_CORRUPT_MALFORMED_XML", C::R1, S::Fail},
        {"FILE_UNENCODABLE_TEXT", C::R1, S::Fail},
        {codes::kNoFileProduced, C::R1, S::Fail},
        {codes::kOutputIsConstant, C::R2, S::Fail},
        {codes::kOutputNotTracking, C::R2, S::Fail},
        {codes::kNoFormulas, C::R2, S::Fail},
        {codes::kCircularReference, C::R2, S::Fail},
        {codes::kBrokenReference, C::R2, S::Fail},
        {codes::kFormulaParseError, C::R2, S::Fail},
        {codes::kRowReferenceMismatch, C::R2, S::Fail},
        {codes::kTotalNotFormula, C::R2, S::Fail},
        {codes::kTotalNotAggregating, C::R2, S::Warn},
        {codes::kExtraneousFormulaColumn, C::R2, S::Warn},
        {codes::kOrphanInput, C::R2, S::Warn},
        {codes::kUnsupportedRef, C::R2, S::Warn},
        {codes::kUnsupportedFunction, C::R2, S::Warn},
        {codes::kErrorValue, C::R2, S::Warn},
        {codes::kBlankPrecedent, C::R2, S::Info},
        {codes::kTotalAggregatesConstants, C::R2, S::Info},
        {codes::kHardwiredNumber, C::R3, S::Fail},
        {codes::kHardwiredPercentConversion, C::R3, S::Warn},
        {codes::kUnlabeledCell, C::R4, S::Fail},
        {codes::kMissingOutput, C::R5, S::Fail},
        {codes::kWrongValue, C::R5, S::Fail},
        {codes::kInputOutOfDomain, C::R5, S::Fail},
    };
    return kinds;
}

std::optional<FindingKind> finding_kind(std::string_view code) {
    for (const auto& k : finding_kinds())
        if (k.code == code) return k;
    return std::nullopt;
}

Finding make_finding(std::string_view code, std::vector<CellAddr> cells, std::string message) {
    auto kind = finding_kind(code);
    if (!kind) throw std::invalid_argument("unregistered finding code " + std::string(code));
    return Finding{std::string(code), kind->severity, kind->criterion, std::move(cells), std::move(message)};
}

bool ErfrReport::failed(bool strict) const {
    return std::any_of(criteria.begin(), criteria.end(),
                       [&](Verdict v) { return v == Verdict::Fail || (strict && v == Verdict::Warn); });
}

std::array<Verdict, 5> aggregate_verdicts(const std::vector<Finding>& findings, AuditMode mode) {
    std::array<Verdict, 5> v;
    v.fill(Verdict::Pass);
    for (const auto& f : findings) {
        auto& slot = v[static_cast<std::size_t>(f.criterion)];
        if (f.severity == Severity::Fail) slot = Verdict::Fail;
        else if (f.severity == Severity::Warn && slot == Verdict::Pass) slot = Verdict::Warn;
    }
    if (mode == AuditMode::Structural) v[4] = Verdict::NotEvaluated;
    return v;
}

namespace {

void append(std::vector<Finding>& into, std::vector<Finding> more) {
    for (auto& f : more) into.push_back(std::move(f));
}

// Formula cells that evaluate to an error not inherited from a precedent.
std::vector<Finding> error_values(const Workbook& wb, const DependencyGraph& g, const Overrides& overrides) {
    EvalOptions options;
    options.overrides = overrides;
    EvalResult res = evaluate(wb, g, options);
    std::vector<Finding> out;
    for (const Cell* c : wb.formula_cells()) {
        if (!c->formula()->tree) continue;
        const auto* err = std::get_if<ErrorValue>(&res.values[c->addr]);
        if (!err || *err == errors::kCycle) continue;
        const auto& ps = g.precedents(c->addr);
        if (std::any_of(ps.begin(), ps.end(), [&](const CellAddr& p) { return is_error(res.value(p)); })) continue;
        out.push_back(make_finding(codes::kErrorValue, {c->addr},
                                   fmt::format("{} evaluates to {}", c->addr.a1(), err->code)));
    }
    return out;
}

bool has_input_cells(const Workbook& wb, const DependencyGraph& g) {
    if (!g.virtual_blanks().empty()) return true;
    for (const Cell* c : wb.cells())
        if (!c->is_formula() && !g.dependents(c->addr).empty()) return true;
    return false;
}

}  // namespace

ErfrReport audit(const Workbook& wb, const ProblemSpec* spec, std::string artifact) {
    ErfrReport report;
    report.artifact = std::move(artifact);
    report.mode = spec ? AuditMode::Spec : AuditMode::Structural;
    DependencyGraph g = build_graph(wb);
    std::vector<Finding> findings = check_structure(wb, g);

    if (spec) {
        InputBindings inputs = bind_inputs(wb, *spec, g);
        OutputBindings outputs = bind_outputs(wb, *spec, g, inputs);
        append(findings, inputs.findings);
        append(findings, outputs.findings);
        append(findings, check_reusability(wb, *spec, inputs, outputs));
        append(findings, check_hardwired(wb));
        append(findings, check_labels(wb, g));
        if (inputs.table) append(findings, check_table_columns(*inputs.table, *spec, wb, inputs, outputs));
        append(findings, check_accuracy(wb, *spec, inputs, outputs));
        append(findings, error_values(wb, g, inputs.base_overrides));
        report.bindings = inputs.bindings;
        for (const auto& b : outputs.bindings) report.bindings.push_back(b);
        report.metrics = {detail::kVectors, spec->tolerance};
    } else {
        if (!wb.formula_cells().empty() && !has_input_cells(wb, g))
            findings.push_back(make_finding(codes::kNoInputCells, {}, "no formula reads any input cell"));
        append(findings, check_hardwired(wb));
        append(findings, check_labels(wb, g));
        append(findings, check_orphans(wb, g));
        append(findings, error_values(wb, g, {}));
        report.metrics = {0, 1e-9};
    }

    std::stable_sort(findings.begin(), findings.end(),
                     [](const Finding& a, const Finding& b) { return a.criterion < b.criterion; });
    report.criteria = aggregate_verdicts(findings, report.mode);
    report.findings = std::move(findings);
    return report;
}

ErfrReport failed_load_report(std::string artifact, AuditMode mode, const std::string& code,
                              const std::string& message) {
    ErfrReport report;
    report.artifact = std::move(artifact);
    report.mode = mode;
    report.findings.push_back(make_finding(code, {}, message));
    report.criteria.fill(Verdict::Fail);
    if (mode == AuditMode::Structural) report.criteria[4] = Verdict::NotEvaluated;
    return report;
}

}  // namespace erfr
