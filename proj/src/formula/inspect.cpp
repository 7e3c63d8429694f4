#include "erfr/formula.hpp"

#include <functional>

namespace erfr {
namespace {

template <typename Fn>
void walk(const Expr& e, Fn&& fn) {
    fn(e);
    if (auto* u = std::get_if<Unary>(&e.node)) {
        walk(*u->operand, fn);
    } else if (auto* b = std::get_if<Binary>(&e.node)) {
        walk(*b->lhs, fn);
        walk(*b->rhs, fn);
    } else if (auto* c = std::get_if<Call>(&e.node)) {
        for (const auto& a : c->args) walk(*a, fn);
    }
}

void collect_literals(const Expr& e, std::vector<std::size_t>& path, const LiteralContext& ctx,
                      std::vector<LiteralSite>& out) {
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, NumberLit>) {
                out.push_back({n.value, path, ctx});
            } else if constexpr (std::is_same_v<T, Unary>) {
                path.push_back(0);
                collect_literals(*n.operand, path,
                                 {LiteralContext::Kind::Unary, std::string(to_string(n.op)), 0}, out);
                path.pop_back();
            } else if constexpr (std::is_same_v<T, Binary>) {
                std::string op(to_string(n.op));
                path.push_back(0);
                collect_literals(*n.lhs, path, {LiteralContext::Kind::Binary, op, 0}, out);
                path.back() = 1;
                collect_literals(*n.rhs, path, {LiteralContext::Kind::Binary, op, 1}, out);
                path.pop_back();
            } else if constexpr (std::is_same_v<T, Call>) {
                for (std::size_t i = 0; i < n.args.size(); ++i) {
                    path.push_back(i);
                    collect_literals(*n.args[i], path, {LiteralContext::Kind::Call, n.name, i}, out);
                    path.pop_back();
                }
            }
        },
        e.node);
}

CellRef shift(CellRef r, int drow, int dcol) {
    if (!r.abs_row) r.row += drow;
    if (!r.abs_col) r.col += dcol;
    return r;
}

}  // namespace

std::vector<LiteralSite> literal_sites(const Expr& tree) {
    std::vector<LiteralSite> out;
    std::vector<std::size_t> path;
    collect_literals(tree, path, {}, out);
    return out;
}

std::vector<CellAddr> references_of(const Expr& tree, std::string_view host_sheet) {
    std::vector<CellAddr> out;
    walk(tree, [&](const Expr& e) {
        if (auto* r = std::get_if<Ref>(&e.node)) {
            out.push_back(r->ref.resolve(host_sheet));
        } else if (auto* rr = std::get_if<RangeRef>(&e.node)) {
            std::string sheet = rr->start.sheet ? *rr->start.sheet : std::string(host_sheet);
            for (int row = rr->start.row; row <= rr->end.row; ++row)
                for (int col = rr->start.col; col <= rr->end.col; ++col) out.emplace_back(sheet, col, row);
        }
    });
    return out;
}

std::vector<CellRef> reference_nodes(const Expr& tree) {
    std::vector<CellRef> out;
    walk(tree, [&](const Expr& e) {
        if (auto* r = std::get_if<Ref>(&e.node)) out.push_back(r->ref);
    });
    return out;
}

std::vector<RangeRef> range_nodes(const Expr& tree) {
    std::vector<RangeRef> out;
    walk(tree, [&](const Expr& e) {
        if (auto* r = std::get_if<RangeRef>(&e.node)) out.push_back(*r);
    });
    return out;
}

std::vector<std::string> function_names(const Expr& tree) {
    std::vector<std::string> out;
    walk(tree, [&](const Expr& e) {
        if (auto* c = std::get_if<Call>(&e.node)) out.push_back(c->name);
    });
    return out;
}

bool contains_error_literal(const Expr& tree) {
    bool found = false;
    walk(tree, [&](const Expr& e) { found = found || std::holds_alternative<ErrorLit>(e.node); });
    return found;
}

ExprPtr shift_references(const ExprPtr& tree, int drow, int dcol) {
    return std::visit(
        [&](const auto& n) -> ExprPtr {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Ref>) {
                return make_ref(shift(n.ref, drow, dcol));
            } else if constexpr (std::is_same_v<T, RangeRef>) {
                return make_range(shift(n.start, drow, dcol), shift(n.end, drow, dcol));
            } else if constexpr (std::is_same_v<T, Unary>) {
                return make_unary(n.op, shift_references(n.operand, drow, dcol));
            } else if constexpr (std::is_same_v<T, Binary>) {
                return make_binary(n.op, shift_references(n.lhs, drow, dcol), shift_references(n.rhs, drow, dcol));
            } else if constexpr (std::is_same_v<T, Call>) {
                std::vector<ExprPtr> args;
                for (const auto& a : n.args) args.push_back(shift_references(a, drow, dcol));
                return make_call(n.name, std::move(args));
            } else {
                return tree;
            }
        },
        tree->node);
}

}  // namespace erfr
