#pragma once

#include "erfr/audit.hpp"

#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace erfr::detail {

inline bool within(double value, double oracle, double tol) {
    return std::isfinite(value) && std::isfinite(oracle) && std::abs(value - oracle) <= tol * std::max(1.0, std::abs(oracle));
}

/// Labels of every non-text position (stored or referenced) and the names
/// whose patterns match it best.
struct LabelIndex {
    std::vector<TableRegion> tables;
    std::map<CellAddr, std::vector<std::string>> claims;  // cell -> best-scoring names

    LabelIndex(const Workbook& wb, const ProblemSpec& spec, const DependencyGraph& g);
    /// Cells claimed by `name`, row-major.
    std::vector<CellAddr> claimed_by(std::string_view name) const;
};

/// Oracle values for one assignment. In daily-table mode per-row outputs get
/// one value per body row and aggregates are sums over the rows.
struct OracleFrame {
    Assignment scalar;
    std::vector<Assignment> rows;
};
OracleFrame oracle_frame(const ProblemSpec& spec, const Assignment& scalar,
                         const std::map<std::string, std::vector<double>, std::less<>>& row_values, int rows);

/// Perturbation number `k` (0..2) of one value.
double perturb(int k, double v, const Domain& d);
inline constexpr int kVectors = 3;

bool is_constant_cell(const Workbook& wb, const CellAddr& a);
std::string fmt_value(const CellValue& v);

}  // namespace erfr::detail
