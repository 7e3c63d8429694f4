#include "interpreter.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

namespace erfr::detail {
namespace {

using Num = std::variant<double, ErrorValue>;

std::string trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return std::string(s);
}

// Scalar coercion used by arithmetic: blank is 0, booleans are 0/1,
// numeric text converts, anything else is #VALUE!.
Num to_number(const CellValue& v) {
    struct {
        Num operator()(Blank) const { return 0.0; }
        Num operator()(double d) const { return d; }
        Num operator()(bool b) const { return b ? 1.0 : 0.0; }
        Num operator()(const std::string& s) const {
            std::string t = trim(s);
            double d = 0;
            auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), d);
            if (t.empty() || ec != std::errc() || p != t.data() + t.size() || !std::isfinite(d)) return errors::kValue;
            return d;
        }
        Num operator()(const ErrorValue& e) const { return e; }
    } visitor;
    return std::visit(visitor, v);
}

CellValue finite_or_num(double d) {
    if (!std::isfinite(d)) return errors::kNum;
    return d;
}

std::string to_text(const CellValue& v) {
    if (auto* s = std::get_if<std::string>(&v)) return *s;
    if (auto* d = std::get_if<double>(&v)) return format_number(*d);
    if (auto* b = std::get_if<bool>(&v)) return *b ? "TRUE" : "FALSE";
    return "";
}

std::string lower(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

// Spreadsheet ordering across types: numbers < text < booleans; blank
// compares as 0 against numbers and "" against text.
int compare(const CellValue& a, const CellValue& b) {
    auto rank = [](const CellValue& v) {
        if (std::holds_alternative<std::string>(v)) return 1;
        if (std::holds_alternative<bool>(v)) return 2;
        return 0;
    };
    CellValue x = a, y = b;
    if (is_blank(x)) x = is_text(y) ? CellValue{std::string()} : is_blank(y) ? CellValue{0.0} : (std::holds_alternative<bool>(y) ? CellValue{false} : CellValue{0.0});
    if (is_blank(y)) y = is_text(x) ? CellValue{std::string()} : (std::holds_alternative<bool>(x) ? CellValue{false} : CellValue{0.0});
    int rx = rank(x), ry = rank(y);
    if (rx != ry) return rx < ry ? -1 : 1;
    if (rx == 0) {
        double dx = std::get<double>(x), dy = std::get<double>(y);
        return dx < dy ? -1 : dx > dy ? 1 : 0;
    }
    if (rx == 1) {
        auto sx = lower(std::get<std::string>(x)), sy = lower(std::get<std::string>(y));
        return sx < sy ? -1 : sx > sy ? 1 : 0;
    }
    bool bx = std::get<bool>(x), by = std::get<bool>(y);
    return bx == by ? 0 : (bx ? 1 : -1);
}

// Numbers gathered for aggregate functions. Values coming from ranges skip
// text, booleans and blanks; direct arguments are coerced.
struct Gathered {
    std::vector<double> numbers;
    std::optional<ErrorValue> error;
};

}  // namespace

CellValue Interpreter::eval(const Expr& e) const {
    return std::visit(
        [&](const auto& n) -> CellValue {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, NumberLit>) return n.value;
            else if constexpr (std::is_same_v<T, StringLit>) return n.value;
            else if constexpr (std::is_same_v<T, BoolLit>) return n.value;
            else if constexpr (std::is_same_v<T, ErrorLit>) return ErrorValue{n.code};
            else if constexpr (std::is_same_v<T, Ref>) return cell ? cell(n.ref) : CellValue{errors::kRef};
            else if constexpr (std::is_same_v<T, RangeRef>) {
                // A bare range outside a function is only meaningful when it is one cell.
                if (!range) return errors::kRef;
                auto vals = range(n);
                if (vals.size() == 1) return vals.front();
                return errors::kValue;
            } else if constexpr (std::is_same_v<T, Var>) return var ? var(n.name) : CellValue{errors::kName};
            else if constexpr (std::is_same_v<T, Unary>) return unary(n);
            else if constexpr (std::is_same_v<T, Binary>) return binary(n);
            else return call(n);
        },
        e.node);
}

CellValue Interpreter::unary(const Unary& u) const {
    Num x = to_number(eval(*u.operand));
    if (auto* err = std::get_if<ErrorValue>(&x)) return *err;
    double d = std::get<double>(x);
    switch (u.op) {
        case UnaryOp::Negate: return -d;
        case UnaryOp::Plus: return d;
        case UnaryOp::Percent: return d / 100.0;
    }
    return errors::kValue;
}

CellValue Interpreter::binary(const Binary& b) const {
    CellValue l = eval(*b.lhs);
    CellValue r = eval(*b.rhs);
    if (auto* e = std::get_if<ErrorValue>(&l)) return *e;
    if (auto* e = std::get_if<ErrorValue>(&r)) return *e;

    switch (b.op) {
        case BinaryOp::Concat: return to_text(l) + to_text(r);
        case BinaryOp::Eq: return compare(l, r) == 0;
        case BinaryOp::Ne: return compare(l, r) != 0;
        case BinaryOp::Lt: return compare(l, r) < 0;
        case BinaryOp::Le: return compare(l, r) <= 0;
        case BinaryOp::Gt: return compare(l, r) > 0;
        case BinaryOp::Ge: return compare(l, r) >= 0;
        default: break;
    }
    Num x = to_number(l), y = to_number(r);
    if (auto* e = std::get_if<ErrorValue>(&x)) return *e;
    if (auto* e = std::get_if<ErrorValue>(&y)) return *e;
    double a = std::get<double>(x), c = std::get<double>(y);
    switch (b.op) {
        case BinaryOp::Add: return finite_or_num(a + c);
        case BinaryOp::Sub: return finite_or_num(a - c);
        case BinaryOp::Mul: return finite_or_num(a * c);
        case BinaryOp::Div:
            if (c == 0) return errors::kDivZero;
            return finite_or_num(a / c);
        case BinaryOp::Pow:
            if (a == 0 && c == 0) return errors::kNum;
            if (a == 0 && c < 0) return errors::kDivZero;
            return finite_or_num(std::pow(a, c));
        default: return errors::kValue;
    }
}

CellValue Interpreter::call(const Call& c) const {
    if (!kSupportedFunctions.contains(c.name)) {
        if (on_unsupported) on_unsupported(c.name);
        return errors::kName;
    }

    if (c.name == "IF") {
        if (c.args.size() < 2 || c.args.size() > 3) return errors::kValue;
        CellValue cond = eval(*c.args[0]);
        if (auto* e = std::get_if<ErrorValue>(&cond)) return *e;
        Num n = to_number(cond);
        if (auto* e = std::get_if<ErrorValue>(&n)) return *e;
        if (std::get<double>(n) != 0) return eval(*c.args[1]);
        return c.args.size() == 3 ? eval(*c.args[2]) : CellValue{false};
    }
    if (c.name == "ROUND") {
        if (c.args.size() != 2) return errors::kValue;
        Num x = to_number(eval(*c.args[0]));
        Num d = to_number(eval(*c.args[1]));
        if (auto* e = std::get_if<ErrorValue>(&x)) return *e;
        if (auto* e = std::get_if<ErrorValue>(&d)) return *e;
        double digits = std::trunc(std::get<double>(d));
        if (std::abs(digits) > 15) return errors::kNum;
        double scale = std::pow(10.0, digits);
        // Half away from zero, as spreadsheets do.
        return finite_or_num(std::round(std::get<double>(x) * scale) / scale);
    }

    Gathered g;
    std::size_t counted = 0;  // COUNT also counts direct numeric arguments
    for (const auto& arg : c.args) {
        if (auto* rr = std::get_if<RangeRef>(&arg->node)) {
            if (!range) return errors::kRef;
            for (const auto& v : range(*rr)) {
                if (auto* e = std::get_if<ErrorValue>(&v)) {
                    if (!g.error) g.error = *e;
                } else if (auto* d = std::get_if<double>(&v)) {
                    g.numbers.push_back(*d);
                }
            }
            continue;
        }
        CellValue v = eval(*arg);
        if (c.name == "COUNT") {
            if (is_number(v)) ++counted;
            continue;
        }
        if (std::holds_alternative<Blank>(v)) {
            // A reference to an empty cell contributes nothing.
            continue;
        }
        Num n = to_number(v);
        if (auto* e = std::get_if<ErrorValue>(&n)) {
            if (!g.error) g.error = *e;
        } else {
            g.numbers.push_back(std::get<double>(n));
        }
    }
    if (c.name == "COUNT") return static_cast<double>(counted + g.numbers.size());
    if (g.error) return *g.error;

    const auto& xs = g.numbers;
    if (c.name == "SUM") {
        double s = 0;
        for (double x : xs) s += x;
        return finite_or_num(s);
    }
    if (c.name == "PRODUCT") {
        if (xs.empty()) return 0.0;
        double p = 1;
        for (double x : xs) p *= x;
        return finite_or_num(p);
    }
    if (c.name == "AVERAGE") {
        if (xs.empty()) return errors::kDivZero;
        double s = 0;
        for (double x : xs) s += x;
        return finite_or_num(s / static_cast<double>(xs.size()));
    }
    if (c.name == "MIN") return xs.empty() ? 0.0 : *std::min_element(xs.begin(), xs.end());
    if (c.name == "MAX") return xs.empty() ? 0.0 : *std::max_element(xs.begin(), xs.end());
    return errors::kName;
}

}  // namespace erfr::detail
