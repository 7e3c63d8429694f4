#pragma once

#include "erfr/address.hpp"

#include <cstddef>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace erfr {

enum class BinaryOp { Add, Sub, Mul, Div, Pow, Concat, Eq, Ne, Lt, Le, Gt, Ge };
enum class UnaryOp { Negate, Plus, Percent };

std::string_view to_string(BinaryOp op);
std::string_view to_string(UnaryOp op);

/// A reference as written in a formula: sheet qualifier is optional and
/// '$' markers are kept so printing is faithful. The graph ignores them.
struct CellRef {
    std::optional<std::string> sheet;
    int col = 1;
    int row = 1;
    bool abs_col = false;
    bool abs_row = false;

    CellAddr resolve(std::string_view host_sheet) const {
        return CellAddr{sheet ? *sheet : std::string(host_sheet), col, row};
    }
    friend bool operator==(const CellRef&, const CellRef&) = default;
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct NumberLit {
    double value = 0;
};
struct StringLit {
    std::string value;
};
struct BoolLit {
    bool value = false;
};
struct ErrorLit {
    std::string code;
};
struct Ref {
    CellRef ref;
};
struct RangeRef {
    CellRef start;
    CellRef end;
};
struct Var {
    std::string name;
};
struct Unary {
    UnaryOp op;
    ExprPtr operand;
};
struct Binary {
    BinaryOp op;
    ExprPtr lhs;
    ExprPtr rhs;
};
struct Call {
    std::string name;  // upper-case
    std::vector<ExprPtr> args;
};

using ExprNode =
    std::variant<NumberLit, StringLit, BoolLit, ErrorLit, Ref, RangeRef, Var, Unary, Binary, Call>;

/// Immutable expression tree node. Trees share structure freely.
struct Expr {
    ExprNode node;
};

bool operator==(const Expr& a, const Expr& b);
bool same_tree(const ExprPtr& a, const ExprPtr& b);

// Node constructors.
ExprPtr make_number(double v);
ExprPtr make_string(std::string v);
ExprPtr make_bool(bool v);
ExprPtr make_error(std::string code);
ExprPtr make_ref(CellRef r);
ExprPtr make_ref(const CellAddr& a);
ExprPtr make_range(CellRef start, CellRef end);  // normalizes corners
ExprPtr make_var(std::string name);
ExprPtr make_unary(UnaryOp op, ExprPtr operand);
ExprPtr make_binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs);
ExprPtr make_call(std::string name, std::vector<ExprPtr> args);

enum class ParseErrorKind {
    LexError,
    UnbalancedParens,
    UnknownToken,
    EmptyFormula,
    UndeclaredVariable,
    ContainsVar,
};
std::string_view to_string(ParseErrorKind k);

class FormulaError : public std::runtime_error {
public:
    FormulaError(ParseErrorKind kind, std::size_t position, const std::string& detail);
    ParseErrorKind kind() const { return kind_; }
    std::size_t position() const { return position_; }

private:
    ParseErrorKind kind_;
    std::size_t position_;
};

/// Parses cell formula text. The text must start with '='.
ExprPtr parse_formula(std::string_view text);

/// Parses an expression over named variables (no cell references). A leading
/// '=' is accepted. Every identifier must be in `declared`.
ExprPtr parse_oracle(std::string_view text, const std::set<std::string, std::less<>>& declared);

/// Canonical text with a leading '='. Throws FormulaError(ContainsVar).
std::string print_formula(const Expr& tree);
/// Canonical text without '=', Var nodes allowed.
std::string print_expression(const Expr& tree);

struct LiteralContext {
    enum class Kind { Root, Unary, Binary, Call } kind = Kind::Root;
    std::string op;          // operator symbol or function name
    std::size_t index = 0;   // operand / argument position
    friend bool operator==(const LiteralContext&, const LiteralContext&) = default;
};

struct LiteralSite {
    double value = 0;
    std::vector<std::size_t> path;  // child indices from the root
    LiteralContext context;
};

/// Every NumberLit in pre-order.
std::vector<LiteralSite> literal_sites(const Expr& tree);

/// Referenced addresses in order of appearance, ranges expanded row-major.
std::vector<CellAddr> references_of(const Expr& tree, std::string_view host_sheet = kDefaultSheet);

/// Visits each Ref / RangeRef node.
std::vector<CellRef> reference_nodes(const Expr& tree);
std::vector<RangeRef> range_nodes(const Expr& tree);
std::vector<std::string> function_names(const Expr& tree);
bool contains_error_literal(const Expr& tree);

/// Moves relative references by (drow, dcol); absolute parts stay. Used to
/// expand shared formulas.
ExprPtr shift_references(const ExprPtr& tree, int drow, int dcol);

/// Replaces each Var with the expression given by `bind`.
template <typename Fn>
ExprPtr substitute_vars(const ExprPtr& tree, Fn&& bind);

// -- implementation of the template ---------------------------------------

template <typename Fn>
ExprPtr substitute_vars(const ExprPtr& tree, Fn&& bind) {
    return std::visit(
        [&](const auto& n) -> ExprPtr {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Var>) {
                return bind(n.name);
            } else if constexpr (std::is_same_v<T, Unary>) {
                return make_unary(n.op, substitute_vars(n.operand, bind));
            } else if constexpr (std::is_same_v<T, Binary>) {
                return make_binary(n.op, substitute_vars(n.lhs, bind), substitute_vars(n.rhs, bind));
            } else if constexpr (std::is_same_v<T, Call>) {
                std::vector<ExprPtr> args;
                for (const auto& a : n.args) args.push_back(substitute_vars(a, bind));
                return make_call(n.name, std::move(args));
            } else {
                return tree;
            }
        },
        tree->node);
}

}  // namespace erfr
