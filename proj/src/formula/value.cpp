#include "erfr/value.hpp"

#include <cstring>

#include <fmt/format.h>

namespace erfr {

std::string format_number(double v) {
    if (v == 0) return "0";  // folds -0
    return fmt::format("{}", v);
}

std::string display(const CellValue& v) {
    struct {
        std::string operator()(Blank) const { return "(blank)"; }
        std::string operator()(double d) const { return format_number(d); }
        std::string operator()(bool b) const { return b ? "TRUE" : "FALSE"; }
        std::string operator()(const std::string& s) const { return "\"" + s + "\""; }
        std::string operator()(const ErrorValue& e) const { return e.code; }
    } visitor;
    return std::visit(visitor, v);
}

bool identical(const CellValue& a, const CellValue& b) {
    if (a.index() != b.index()) return false;
    if (auto* x = std::get_if<double>(&a)) {
        double y = std::get<double>(b);
        return std::memcmp(x, &y, sizeof y) == 0;
    }
    return a == b;
}

}  // namespace erfr
