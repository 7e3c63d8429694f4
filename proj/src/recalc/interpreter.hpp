#pragma once

#include "erfr/formula.hpp"
#include "erfr/value.hpp"

#include <functional>
#include <set>
#include <string>
#include <vector>

namespace erfr::detail {

inline const std::set<std::string, std::less<>> kSupportedFunctions = {
    "SUM", "AVERAGE", "MIN", "MAX", "COUNT", "PRODUCT", "IF", "ROUND",
};

/// Tree-walking evaluator. The callbacks supply cell and variable values;
/// unsupported functions are reported through `on_unsupported`.
struct Interpreter {
    std::function<CellValue(const CellRef&)> cell;
    std::function<std::vector<CellValue>(const RangeRef&)> range;
    std::function<CellValue(const std::string&)> var;
    std::function<void(const std::string&)> on_unsupported;

    CellValue eval(const Expr& e) const;

private:
    CellValue unary(const Unary& u) const;
    CellValue binary(const Binary& b) const;
    CellValue call(const Call& c) const;
};

}  // namespace erfr::detail
