#pragma once

#include "erfr/workbook.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace erfr {

/// Structural defects found while building the graph or evaluating.
struct Diagnostic {
    enum class Code {
        BlankPrecedent,       // a direct reference to an empty cell
        BrokenReference,      // out of sheet bounds, unknown sheet, or #REF!
        CrossSheetReference,  // parsed but not supported by the audit
        ParseError,           // the formula text did not parse
        RangeTooLarge,        // range not expanded into edges
        Cycle,
        UnsupportedFunction,
        ErrorValue,           // formula evaluated to an error
    };
    CellAddr addr;  // the formula cell
    Code code;
    std::string detail;
    std::optional<CellAddr> related;  // e.g. the blank cell for BlankPrecedent

    friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};
std::string_view to_string(Diagnostic::Code c);

/// Precedent edges of every formula cell plus the reverse index.
class DependencyGraph {
public:
    /// Addresses read by `formula`, deduplicated, in first-appearance order.
    const std::vector<CellAddr>& precedents(const CellAddr& formula) const;
    /// Formula cells that read `cell`, sorted.
    const std::vector<CellAddr>& dependents(const CellAddr& cell) const;

    bool is_formula(const CellAddr& a) const { return forward_.contains(a); }
    /// Referenced addresses with no stored content.
    const std::set<CellAddr>& virtual_blanks() const { return virtual_blanks_; }
    const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

    std::vector<CellAddr> nodes() const;
    std::vector<CellAddr> formula_nodes() const;
    std::size_t edge_count() const;

private:
    friend DependencyGraph build_graph(const Workbook& wb);
    std::map<CellAddr, std::vector<CellAddr>> forward_;
    std::map<CellAddr, std::vector<CellAddr>> reverse_;
    std::set<CellAddr> virtual_blanks_;
    std::vector<Diagnostic> diagnostics_;
};

inline constexpr std::size_t kMaxRangeCells = 1u << 20;

DependencyGraph build_graph(const Workbook& wb);

/// Strongly connected components of size >= 2 plus self-loops; each cycle
/// starts at its smallest address, cycles sorted by that address.
std::vector<std::vector<CellAddr>> detect_cycles(const DependencyGraph& g);

struct EvalResult {
    std::map<CellAddr, CellValue> values;
    std::vector<Diagnostic> diagnostics;

    /// Computed or stored value; Blank for addresses with no content.
    CellValue value(const CellAddr& a) const;
    std::optional<double> number(const CellAddr& a) const;

    friend bool operator==(const EvalResult& a, const EvalResult& b);
};

class OverrideTargetsFormula : public std::runtime_error {
public:
    explicit OverrideTargetsFormula(const CellAddr& a)
        : std::runtime_error("override targets formula cell " + a.qualified()), addr(a) {}
    CellAddr addr;
};

using Overrides = std::map<CellAddr, CellValue>;

struct EvalOptions {
    Overrides overrides;
    /// When set, ties in the topological order are broken pseudo-randomly.
    std::optional<std::uint64_t> shuffle_seed;
};

EvalResult evaluate(const Workbook& wb, const EvalOptions& options = {});
EvalResult evaluate(const Workbook& wb, const Overrides& overrides);
EvalResult evaluate(const Workbook& wb, const DependencyGraph& g, const EvalOptions& options);

/// Evaluates a standalone expression whose Var leaves take values from
/// `vars`; cell references are not allowed (they yield #REF!).
CellValue evaluate_expression(const Expr& tree, const std::map<std::string, double, std::less<>>& vars);

struct Fingerprint {
    std::uint64_t digest = 0;
    std::string dump;  // one line per cell: address, kind, canonical content
    std::string hex() const;
};

Fingerprint fingerprint(const Workbook& wb);

}  // namespace erfr
