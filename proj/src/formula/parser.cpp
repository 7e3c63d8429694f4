#include "erfr/formula.hpp"

#include "lexer.hpp"

#include <algorithm>
#include <cctype>
#include <regex>

namespace erfr {

using detail::Tok;
using detail::Token;

std::string_view to_string(ParseErrorKind k) {
    switch (k) {
        case ParseErrorKind::LexError: return "LexError";
        case ParseErrorKind::UnbalancedParens: return "UnbalancedParens";
        case ParseErrorKind::UnknownToken: return "UnknownToken";
        case ParseErrorKind::EmptyFormula: return "EmptyFormula";
        case ParseErrorKind::UndeclaredVariable: return "UndeclaredVariable";
        case ParseErrorKind::ContainsVar: return "ContainsVar";
    }
    return "?";
}

FormulaError::FormulaError(ParseErrorKind kind, std::size_t position, const std::string& detail)
    : std::runtime_error(std::string(to_string(kind)) + " at " + std::to_string(position) + ": " + detail),
      kind_(kind),
      position_(position) {}

namespace {

std::string upper(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

// "$A$1", "b12", "AB$3" -> CellRef; anything else -> nullopt.
std::optional<CellRef> as_cell_ref(std::string_view word) {
    static const std::regex pattern(R"(^(\$?)([A-Za-z]{1,3})(\$?)([0-9]{1,7})$)");
    std::cmatch m;
    if (!std::regex_match(word.begin(), word.end(), m, pattern)) return std::nullopt;
    CellRef r;
    r.abs_col = m[1].length() > 0;
    r.col = *column_index(m[2].str());
    r.abs_row = m[3].length() > 0;
    r.row = std::stoi(m[4].str());
    if (r.row < 1) return std::nullopt;
    return r;
}

enum class Mode { Formula, Oracle };

class Parser {
public:
    Parser(std::vector<Token> tokens, Mode mode, const std::set<std::string, std::less<>>* declared)
        : toks_(std::move(tokens)), mode_(mode), declared_(declared) {}

    ExprPtr parse_all() {
        if (peek().kind == Tok::End) throw FormulaError(ParseErrorKind::EmptyFormula, peek().pos, "empty formula");
        ExprPtr e = comparison();
        if (peek().kind == Tok::RParen)
            throw FormulaError(ParseErrorKind::UnbalancedParens, peek().pos, "unmatched ')'");
        if (peek().kind != Tok::End) unexpected();
        return e;
    }

private:
    const Token& peek() const { return toks_[i_]; }
    const Token& next() { return toks_[i_ < toks_.size() - 1 ? i_++ : i_]; }
    bool at_op(std::string_view op) const { return peek().kind == Tok::Op && peek().text == op; }

    [[noreturn]] void unexpected() const {
        const auto& t = peek();
        if (t.kind == Tok::End) throw FormulaError(ParseErrorKind::UnknownToken, t.pos, "unexpected end of formula");
        throw FormulaError(ParseErrorKind::UnknownToken, t.pos, "unexpected token '" + t.text + "'");
    }

    ExprPtr comparison() {
        ExprPtr lhs = concat();
        for (;;) {
            std::optional<BinaryOp> op;
            if (at_op("=")) op = BinaryOp::Eq;
            else if (at_op("<>")) op = BinaryOp::Ne;
            else if (at_op("<")) op = BinaryOp::Lt;
            else if (at_op("<=")) op = BinaryOp::Le;
            else if (at_op(">")) op = BinaryOp::Gt;
            else if (at_op(">=")) op = BinaryOp::Ge;
            if (!op) return lhs;
            next();
            lhs = make_binary(*op, lhs, concat());
        }
    }

    ExprPtr concat() {
        ExprPtr lhs = additive();
        while (at_op("&")) {
            next();
            lhs = make_binary(BinaryOp::Concat, lhs, additive());
        }
        return lhs;
    }

    ExprPtr additive() {
        ExprPtr lhs = term();
        while (at_op("+") || at_op("-")) {
            auto op = next().text == "+" ? BinaryOp::Add : BinaryOp::Sub;
            lhs = make_binary(op, lhs, term());
        }
        return lhs;
    }

    ExprPtr term() {
        ExprPtr lhs = power();
        while (at_op("*") || at_op("/")) {
            auto op = next().text == "*" ? BinaryOp::Mul : BinaryOp::Div;
            lhs = make_binary(op, lhs, power());
        }
        return lhs;
    }

    ExprPtr power() {
        ExprPtr lhs = prefix();
        while (at_op("^")) {
            next();
            lhs = make_binary(BinaryOp::Pow, lhs, prefix());
        }
        return lhs;
    }

    // Prefix signs bind tighter than '^', so "-2^2" is (-2)^2.
    ExprPtr prefix() {
        if (at_op("-")) {
            next();
            return make_unary(UnaryOp::Negate, prefix());
        }
        if (at_op("+")) {
            next();
            return make_unary(UnaryOp::Plus, prefix());
        }
        return postfix();
    }

    ExprPtr postfix() {
        ExprPtr e = primary();
        while (at_op("%")) {
            next();
            e = make_unary(UnaryOp::Percent, e);
        }
        return e;
    }

    ExprPtr primary() {
        const Token& t = peek();
        switch (t.kind) {
            case Tok::Number:
                next();
                return make_number(t.number);
            case Tok::String:
                next();
                return make_string(t.text);
            case Tok::Error:
                next();
                return make_error(t.text);
            case Tok::LParen: {
                std::size_t open = t.pos;
                next();
                if (peek().kind == Tok::RParen) unexpected();
                ExprPtr inner = comparison();
                if (peek().kind != Tok::RParen) {
                    if (peek().kind == Tok::End)
                        throw FormulaError(ParseErrorKind::UnbalancedParens, open, "unclosed '('");
                    unexpected();
                }
                next();
                return inner;
            }
            case Tok::QuotedName: {
                if (mode_ == Mode::Oracle) unexpected();
                std::string sheet = t.text;
                next();
                return sheet_qualified(std::move(sheet));
            }
            case Tok::Word:
                return word();
            case Tok::RParen:
                throw FormulaError(ParseErrorKind::UnbalancedParens, t.pos, "unmatched ')'");
            default:
                unexpected();
        }
    }

    ExprPtr sheet_qualified(std::string sheet) {
        if (peek().kind != Tok::Bang) unexpected();
        next();
        if (peek().kind != Tok::Word) unexpected();
        auto ref = as_cell_ref(peek().text);
        if (!ref) unexpected();
        next();
        ref->sheet = sheet;
        return maybe_range(*ref);
    }

    ExprPtr maybe_range(CellRef start) {
        if (peek().kind != Tok::Colon) return make_ref(start);
        next();
        if (peek().kind != Tok::Word) unexpected();
        auto end = as_cell_ref(peek().text);
        if (!end) unexpected();
        next();
        end->sheet = start.sheet;
        return make_range(start, *end);
    }

    ExprPtr word() {
        Token t = next();
        if (peek().kind == Tok::LParen) return call(upper(t.text));
        if (mode_ == Mode::Oracle) {
            if (!declared_ || !declared_->contains(t.text))
                throw FormulaError(ParseErrorKind::UndeclaredVariable, t.pos, "undeclared variable '" + t.text + "'");
            return make_var(t.text);
        }
        if (peek().kind == Tok::Bang) return sheet_qualified(t.text);
        if (auto ref = as_cell_ref(t.text)) return maybe_range(*ref);
        auto u = upper(t.text);
        if (u == "TRUE") return make_bool(true);
        if (u == "FALSE") return make_bool(false);
        throw FormulaError(ParseErrorKind::UnknownToken, t.pos, "unknown name '" + t.text + "'");
    }

    ExprPtr call(std::string name) {
        std::size_t open = peek().pos;
        next();  // '('
        std::vector<ExprPtr> args;
        if (peek().kind == Tok::RParen) {
            next();
            return make_call(std::move(name), std::move(args));
        }
        for (;;) {
            args.push_back(comparison());
            if (peek().kind == Tok::Comma) {
                next();
                continue;
            }
            if (peek().kind == Tok::RParen) {
                next();
                break;
            }
            if (peek().kind == Tok::End)
                throw FormulaError(ParseErrorKind::UnbalancedParens, open, "unclosed '(' in call");
            unexpected();
        }
        return make_call(std::move(name), std::move(args));
    }

    std::vector<Token> toks_;
    std::size_t i_ = 0;
    Mode mode_;
    const std::set<std::string, std::less<>>* declared_;
};

}  // namespace

ExprPtr parse_formula(std::string_view text) {
    if (text.empty() || text.front() != '=')
        throw FormulaError(ParseErrorKind::LexError, 0, "formula must start with '='");
    Parser p(detail::lex(text.substr(1), 1), Mode::Formula, nullptr);
    return p.parse_all();
}

ExprPtr parse_oracle(std::string_view text, const std::set<std::string, std::less<>>& declared) {
    std::size_t skip = (!text.empty() && text.front() == '=') ? 1 : 0;
    Parser p(detail::lex(text.substr(skip), skip), Mode::Oracle, &declared);
    return p.parse_all();
}

}  // namespace erfr
