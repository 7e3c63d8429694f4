#pragma once

#include <optional>
#include <string>
#include <variant>

namespace erfr {

struct Blank {
    friend bool operator==(Blank, Blank) { return true; }
};

struct ErrorValue {
    std::string code;  // "#REF!", "#DIV/0!", ...
    friend bool operator==(const ErrorValue&, const ErrorValue&) = default;
};

namespace errors {
inline const ErrorValue kDivZero{"#DIV/0!"};
inline const ErrorValue kValue{"#VALUE!"};
inline const ErrorValue kRef{"#REF!"};
inline const ErrorValue kName{"#NAME?"};
inline const ErrorValue kNum{"#NUM!"};
inline const ErrorValue kNa{"#N/A"};
// Nonstandard: marks members of a circular reference.
inline const ErrorValue kCycle{"#CYCLE!"};
}  // namespace errors

/// Number is always finite; Blank carries nothing.
using CellValue = std::variant<Blank, double, bool, std::string, ErrorValue>;

inline bool is_blank(const CellValue& v) { return std::holds_alternative<Blank>(v); }
inline bool is_number(const CellValue& v) { return std::holds_alternative<double>(v); }
inline bool is_text(const CellValue& v) { return std::holds_alternative<std::string>(v); }
inline bool is_error(const CellValue& v) { return std::holds_alternative<ErrorValue>(v); }

inline std::optional<double> number_of(const CellValue& v) {
    if (auto* d = std::get_if<double>(&v)) return *d;
    return std::nullopt;
}

/// Shortest text that parses back to the same double.
std::string format_number(double v);
/// Human-readable rendering used in messages and dumps.
std::string display(const CellValue& v);
/// Bitwise equality for numbers, ordinary equality otherwise.
bool identical(const CellValue& a, const CellValue& b);

}  // namespace erfr
