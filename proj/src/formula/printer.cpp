#include "erfr/formula.hpp"
#include "erfr/value.hpp"

#include <algorithm>
#include <cctype>

namespace erfr {

std::string_view to_string(BinaryOp op) {
    switch (op) {
        case BinaryOp::Add: return "+";
        case BinaryOp::Sub: return "-";
        case BinaryOp::Mul: return "*";
        case BinaryOp::Div: return "/";
        case BinaryOp::Pow: return "^";
        case BinaryOp::Concat: return "&";
        case BinaryOp::Eq: return "=";
        case BinaryOp::Ne: return "<>";
        case BinaryOp::Lt: return "<";
        case BinaryOp::Le: return "<=";
        case BinaryOp::Gt: return ">";
        case BinaryOp::Ge: return ">=";
    }
    return "?";
}

std::string_view to_string(UnaryOp op) {
    switch (op) {
        case UnaryOp::Negate: return "-";
        case UnaryOp::Plus: return "+";
        case UnaryOp::Percent: return "%";
    }
    return "?";
}

// ---- construction --------------------------------------------------------

ExprPtr make_number(double v) { return std::make_shared<const Expr>(Expr{NumberLit{v}}); }
ExprPtr make_string(std::string v) { return std::make_shared<const Expr>(Expr{StringLit{std::move(v)}}); }
ExprPtr make_bool(bool v) { return std::make_shared<const Expr>(Expr{BoolLit{v}}); }
ExprPtr make_error(std::string code) { return std::make_shared<const Expr>(Expr{ErrorLit{std::move(code)}}); }
ExprPtr make_ref(CellRef r) { return std::make_shared<const Expr>(Expr{Ref{std::move(r)}}); }
ExprPtr make_ref(const CellAddr& a) { return make_ref(CellRef{std::nullopt, a.col, a.row, false, false}); }
ExprPtr make_var(std::string name) { return std::make_shared<const Expr>(Expr{Var{std::move(name)}}); }

ExprPtr make_range(CellRef start, CellRef end) {
    if (start.row > end.row) {
        std::swap(start.row, end.row);
        std::swap(start.abs_row, end.abs_row);
    }
    if (start.col > end.col) {
        std::swap(start.col, end.col);
        std::swap(start.abs_col, end.abs_col);
    }
    end.sheet = start.sheet;
    return std::make_shared<const Expr>(Expr{RangeRef{std::move(start), std::move(end)}});
}

ExprPtr make_unary(UnaryOp op, ExprPtr operand) {
    return std::make_shared<const Expr>(Expr{Unary{op, std::move(operand)}});
}

ExprPtr make_binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs) {
    return std::make_shared<const Expr>(Expr{Binary{op, std::move(lhs), std::move(rhs)}});
}

ExprPtr make_call(std::string name, std::vector<ExprPtr> args) {
    for (auto& c : name) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return std::make_shared<const Expr>(Expr{Call{std::move(name), std::move(args)}});
}

// ---- equality --------------------------------------------------------------

bool same_tree(const ExprPtr& a, const ExprPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    return *a == *b;
}

bool operator==(const Expr& a, const Expr& b) {
    if (a.node.index() != b.node.index()) return false;
    return std::visit(
        [&](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            const auto& y = std::get<T>(b.node);
            if constexpr (std::is_same_v<T, NumberLit>) return identical(x.value, y.value);
            else if constexpr (std::is_same_v<T, StringLit>) return x.value == y.value;
            else if constexpr (std::is_same_v<T, BoolLit>) return x.value == y.value;
            else if constexpr (std::is_same_v<T, ErrorLit>) return x.code == y.code;
            else if constexpr (std::is_same_v<T, Ref>) return x.ref == y.ref;
            else if constexpr (std::is_same_v<T, RangeRef>) return x.start == y.start && x.end == y.end;
            else if constexpr (std::is_same_v<T, Var>) return x.name == y.name;
            else if constexpr (std::is_same_v<T, Unary>) return x.op == y.op && same_tree(x.operand, y.operand);
            else if constexpr (std::is_same_v<T, Binary>)
                return x.op == y.op && same_tree(x.lhs, y.lhs) && same_tree(x.rhs, y.rhs);
            else {
                if (x.name != y.name || x.args.size() != y.args.size()) return false;
                for (std::size_t i = 0; i < x.args.size(); ++i)
                    if (!same_tree(x.args[i], y.args[i])) return false;
                return true;
            }
        },
        a.node);
}

// ---- printing ----------------------------------------------------------------

namespace {

// Binding strength; larger binds tighter. Must agree with the parser.
constexpr int kPrecCompare = 1;
constexpr int kPrecConcat = 2;
constexpr int kPrecAdd = 3;
constexpr int kPrecMul = 4;
constexpr int kPrecPow = 5;
constexpr int kPrecPrefix = 6;
constexpr int kPrecPercent = 7;
constexpr int kPrecAtom = 8;

int precedence(BinaryOp op) {
    switch (op) {
        case BinaryOp::Add:
        case BinaryOp::Sub: return kPrecAdd;
        case BinaryOp::Mul:
        case BinaryOp::Div: return kPrecMul;
        case BinaryOp::Pow: return kPrecPow;
        case BinaryOp::Concat: return kPrecConcat;
        default: return kPrecCompare;
    }
}

int precedence(const Expr& e) {
    if (auto* b = std::get_if<Binary>(&e.node)) return precedence(b->op);
    if (auto* u = std::get_if<Unary>(&e.node)) return u->op == UnaryOp::Percent ? kPrecPercent : kPrecPrefix;
    return kPrecAtom;
}

bool sheet_needs_quotes(const std::string& s) {
    if (s.empty() || std::isdigit(static_cast<unsigned char>(s.front()))) return true;
    return !std::all_of(s.begin(), s.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
    });
}

std::string print_sheet(const std::string& s) {
    if (!sheet_needs_quotes(s)) return s;
    std::string out = "'";
    for (char c : s) {
        if (c == '\'') out += "''";
        else out.push_back(c);
    }
    return out + "'";
}

std::string print_cell(const CellRef& r, bool with_sheet) {
    std::string out;
    if (with_sheet && r.sheet) out += print_sheet(*r.sheet) + "!";
    if (r.abs_col) out += "$";
    out += column_name(r.col);
    if (r.abs_row) out += "$";
    out += std::to_string(r.row);
    return out;
}

class Printer {
public:
    explicit Printer(bool allow_vars) : allow_vars_(allow_vars) {}

    void emit(const Expr& e) {
        std::visit([&](const auto& n) { node(n); }, e.node);
    }

    std::string out;

private:
    void wrapped(const Expr& e, bool parens) {
        if (parens) out += "(";
        emit(e);
        if (parens) out += ")";
    }

    void node(const NumberLit& n) { out += format_number(n.value); }
    void node(const StringLit& n) {
        out += '"';
        for (char c : n.value) {
            if (c == '"') out += "\"\"";
            else out.push_back(c);
        }
        out += '"';
    }
    void node(const BoolLit& n) { out += n.value ? "TRUE" : "FALSE"; }
    void node(const ErrorLit& n) { out += n.code; }
    void node(const Ref& n) { out += print_cell(n.ref, true); }
    void node(const RangeRef& n) { out += print_cell(n.start, true) + ":" + print_cell(n.end, false); }
    void node(const Var& n) {
        if (!allow_vars_) throw FormulaError(ParseErrorKind::ContainsVar, 0, "variable '" + n.name + "' in formula");
        out += n.name;
    }
    void node(const Unary& n) {
        if (n.op == UnaryOp::Percent) {
            wrapped(*n.operand, precedence(*n.operand) < kPrecPercent);
            out += "%";
        } else {
            out += to_string(n.op);
            wrapped(*n.operand, precedence(*n.operand) < kPrecPrefix);
        }
    }
    void node(const Binary& n) {
        int p = precedence(n.op);
        wrapped(*n.lhs, precedence(*n.lhs) < p);
        out += to_string(n.op);
        wrapped(*n.rhs, precedence(*n.rhs) <= p);
    }
    void node(const Call& n) {
        out += n.name;
        out += "(";
        for (std::size_t i = 0; i < n.args.size(); ++i) {
            if (i) out += ",";
            emit(*n.args[i]);
        }
        out += ")";
    }

    bool allow_vars_;
};

}  // namespace

std::string print_formula(const Expr& tree) {
    Printer p(false);
    p.emit(tree);
    return "=" + p.out;
}

std::string print_expression(const Expr& tree) {
    Printer p(true);
    p.emit(tree);
    return p.out;
}

}  // namespace erfr
