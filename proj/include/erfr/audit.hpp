#pragma once

#include "erfr/recalc.hpp"
#include "erfr/spec.hpp"
#include "erfr/workbook.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace erfr {

enum class Criterion { R1, R2, R3, R4, R5 };
enum class Severity { Info, Warn, Fail };
enum class Verdict { Pass, Warn, Fail, NotEvaluated };
enum class AuditMode { Spec, Structural };

std::string_view to_string(Criterion c);
std::string_view to_string(Severity s);
std::string_view to_string(Verdict v);
std::string_view to_string(AuditMode m);

/// Stable finding codes. Each code has a fixed criterion and severity.
namespace codes {
inline constexpr std::string_view kInputNotFound = "INPUT_NOT_FOUND";
inline constexpr std::string_view kInputHardwired = "INPUT_HARDWIRED";
inline constexpr std::string_view kDuplicateInput = "DUPLICATE_INPUT";
inline constexpr std::string_view kOutputIsConstant = "OUTPUT_IS_CONSTANT";
inline constexpr std::string_view kOutputNotTracking = "OUTPUT_NOT_TRACKING";
inline constexpr std::string_view kNoFormulas = "NO_FORMULAS";
inline constexpr std::string_view kNoInputCells = "NO_INPUT_CELLS";
inline constexpr std::string_view kOrphanInput = "ORPHAN_INPUT";
inline constexpr std::string_view kCircularReference = "CIRCULAR_REFERENCE";
inline constexpr std::string_view kBrokenReference = "BROKEN_REFERENCE";
inline constexpr std::string_view kFormulaParseError = "FORMULA_PARSE_ERROR";
inline constexpr std::string_view kUnsupportedRef = "UNSUPPORTED_REF";
inline constexpr std::string_view kUnsupportedFunction = "UNSUPPORTED_FUNCTION";
inline constexpr std::string_view kBlankPrecedent = "BLANK_PRECEDENT";
inline constexpr std::string_view kErrorValue = "ERROR_VALUE";
inline constexpr std::string_view kRowReferenceMismatch = "ROW_REFERENCE_MISMATCH";
inline constexpr std::string_view kTotalNotFormula = "TOTAL_NOT_FORMULA";
inline constexpr std::string_view kTotalNotAggregating = "TOTAL_NOT_AGGREGATING";
inline constexpr std::string_view kTotalAggregatesConstants = "TOTAL_AGGREGATES_CONSTANTS";
inline constexpr std::string_view kExtraneousFormulaColumn = "EXTRANEOUS_FORMULA_COLUMN";
inline constexpr std::string_view kHardwiredNumber = "HARDWIRED_NUMBER";
inline constexpr std::string_view kHardwiredPercentConversion = "HARDWIRED_PERCENT_CONVERSION";
inline constexpr std::string_view kUnlabeledCell = "UNLABELED_CELL";
inline constexpr std::string_view kMissingOutput = "MISSING_OUTPUT";
inline constexpr std::string_view kWrongValue = "WRONG_VALUE";
inline constexpr std::string_view kInputOutOfDomain = "INPUT_OUT_OF_DOMAIN";
inline constexpr std::string_view kNoFileProduced = "NO_FILE_PRODUCED";
// File-reliability codes come from XlsxError::finding_code().
}  // namespace codes

struct FindingKind {
    std::string_view code;
    Criterion criterion;
    Severity severity;
};
/// Registry of every code the audit can emit, in documentation order.
const std::vector<FindingKind>& finding_kinds();
std::optional<FindingKind> finding_kind(std::string_view code);

struct Finding {
    std::string code;
    Severity severity = Severity::Fail;
    Criterion criterion = Criterion::R1;
    std::vector<CellAddr> cells;
    std::string message;

    friend bool operator==(const Finding&, const Finding&) = default;
};

/// Builds a finding with the registered criterion and severity of `code`.
Finding make_finding(std::string_view code, std::vector<CellAddr> cells, std::string message);

enum class BindMethod { Label, Value, PerturbationConfirmed, TableColumn, RowCount, Default };
std::string_view to_string(BindMethod m);

struct Binding {
    std::string name;
    bool is_input = false;
    std::vector<CellAddr> cells;  // empty for row-count and unbound inputs
    BindMethod method = BindMethod::Label;
    Encoding encoding = Encoding::Identity;
    bool confirmed = false;  // output tracked the oracle on every perturbation vector
    std::string note;

    friend bool operator==(const Binding&, const Binding&) = default;
};

/// A header row of Text cells over at least three body rows.
struct TableRegion {
    enum class ColumnKind { Constant, Formula, Mixed };
    struct Column {
        int col = 0;
        std::string header;  // empty when the header cell is not Text
        ColumnKind kind = ColumnKind::Mixed;
        friend bool operator==(const Column&, const Column&) = default;
    };
    std::string sheet;
    int header_row = 0;
    int first_row = 0;  // body
    int last_row = 0;
    std::vector<Column> columns;

    int body_rows() const { return last_row - first_row + 1; }
    const Column* column(int col) const;
    bool contains_body(const CellAddr& a) const;
    friend bool operator==(const TableRegion&, const TableRegion&) = default;
};

std::vector<TableRegion> detect_tables(const Workbook& wb);

/// Normalized label words: lowercase, parenthesized/bracketed parts and
/// punctuation removed.
std::vector<std::string> label_tokens(std::string_view text);

/// The words naming a cell: the nearest Text to its left in the same row,
/// and its column heading (table header, or the Text above a run of values).
struct CellLabel {
    std::vector<std::string> row;
    std::vector<std::string> column;
    std::vector<std::string> all() const;
    bool empty() const { return row.empty() && column.empty(); }
};
CellLabel label_of(const Workbook& wb, const CellAddr& a, const std::vector<TableRegion>& tables);

/// Score of a pattern against a label, or nullopt when some pattern word is
/// missing. Higher is better.
struct MatchScore {
    bool exact_part = false;  // the pattern is exactly the row or column label
    double coverage = 0;      // pattern words / label words
    friend auto operator<=>(const MatchScore&, const MatchScore&) = default;
};
std::optional<MatchScore> match_label(const std::vector<std::string>& pattern, const CellLabel& label);

// ---- binding and checks ---------------------------------------------------

/// Everything later checks need to know about the bound inputs.
struct InputBindings {
    std::vector<Binding> bindings;  // one per spec input, in spec order
    std::vector<Finding> findings;
    Assignment base;                // decoded values (defaults for blanks and unbound inputs)
    /// Per-row values of table-column inputs at base, keyed by input name.
    std::map<std::string, std::vector<double>, std::less<>> row_values;
    std::optional<TableRegion> table;  // set in daily-table mode
    Overrides base_overrides;

    const Binding* find(std::string_view name) const;
};

struct OutputBindings {
    std::vector<Binding> bindings;  // bound outputs only
    std::vector<Finding> findings;
    const Binding* find(std::string_view name) const;
};

InputBindings bind_inputs(const Workbook& wb, const ProblemSpec& spec, const DependencyGraph& g);
OutputBindings bind_outputs(const Workbook& wb, const ProblemSpec& spec, const DependencyGraph& g,
                            const InputBindings& inputs);

/// The K = 3 deterministic perturbation vectors (scaled 1.5, scaled 0.75,
/// integer inputs bumped by 7), clamped to each input's domain.
std::vector<Assignment> perturbation_vectors(const ProblemSpec& spec, const Assignment& base);

/// Updates `outputs` (confirmed flags and methods) and returns R2 findings.
std::vector<Finding> check_reusability(const Workbook& wb, const ProblemSpec& spec, const InputBindings& inputs,
                                       OutputBindings& outputs);
std::vector<Finding> check_hardwired(const Workbook& wb);
std::vector<Finding> check_labels(const Workbook& wb, const DependencyGraph& g);
std::vector<Finding> check_table_columns(const TableRegion& table, const ProblemSpec& spec, const Workbook& wb,
                                         const InputBindings& inputs, const OutputBindings& outputs);
std::vector<Finding> check_accuracy(const Workbook& wb, const ProblemSpec& spec, const InputBindings& inputs,
                                    const OutputBindings& outputs);
/// Cycles, broken references, parse errors and similar graph-level defects.
std::vector<Finding> check_structure(const Workbook& wb, const DependencyGraph& g);
std::vector<Finding> check_orphans(const Workbook& wb, const DependencyGraph& g);

struct AuditMetrics {
    int perturbation_vectors = 0;
    double tolerance = 0;
    friend bool operator==(const AuditMetrics&, const AuditMetrics&) = default;
};

struct ErfrReport {
    std::string artifact;
    AuditMode mode = AuditMode::Structural;
    std::array<Verdict, 5> criteria{};
    std::vector<Finding> findings;
    std::vector<Binding> bindings;
    AuditMetrics metrics;

    Verdict verdict(Criterion c) const { return criteria[static_cast<std::size_t>(c)]; }
    /// True when some criterion is Fail (or Warn, with `strict`).
    bool failed(bool strict = false) const;
    friend bool operator==(const ErfrReport&, const ErfrReport&) = default;
};

/// Verdicts from findings: any fail -> Fail, else any warn -> Warn, else
/// Pass. R5 is NotEvaluated in structural mode.
std::array<Verdict, 5> aggregate_verdicts(const std::vector<Finding>& findings, AuditMode mode);

ErfrReport audit(const Workbook& wb, const ProblemSpec* spec, std::string artifact = "");
inline ErfrReport audit(const Workbook& wb, const ProblemSpec& spec, std::string artifact = "") {
    return audit(wb, &spec, std::move(artifact));
}

/// Report for a file that could not be loaded: every criterion fails.
ErfrReport failed_load_report(std::string artifact, AuditMode mode, const std::string& code, const std::string& message);

std::string report_json(const ErfrReport& r, int indent = 2);
std::string report_text(const ErfrReport& r);
/// Inverse of report_json; throws std::invalid_argument on unknown enum names.
ErfrReport report_from_json(std::string_view text);

}  // namespace erfr
