#include "erfr/recalc.hpp"

#include "interpreter.hpp"

#include <algorithm>
#include <fmt/format.h>

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

const std::vector<CellAddr> kNone;

bool stored_blank(const Workbook& wb, const CellAddr& a) {
    const Cell* c = wb.find(a);
    if (!c) return true;
    const CellValue* v = c->constant();
    return v && is_blank(*v);
}

}  // namespace

std::string_view to_string(Diagnostic::Code c) {
    switch (c) {
        case Diagnostic::Code::BlankPrecedent: return "BlankPrecedent";
        case Diagnostic::Code::BrokenReference: return "BrokenReference";
        case Diagnostic::Code::CrossSheetReference: return "CrossSheetReference";
        case Diagnostic::Code::ParseError: return "ParseError";
        case Diagnostic::Code::RangeTooLarge: return "RangeTooLarge";
        case Diagnostic::Code::Cycle: return "Cycle";
        case Diagnostic::Code::UnsupportedFunction: return "UnsupportedFunction";
        case Diagnostic::Code::ErrorValue: return "ErrorValue";
    }
    return "?";
}

const std::vector<CellAddr>& DependencyGraph::precedents(const CellAddr& formula) const {
    auto it = forward_.find(formula);
    return it == forward_.end() ? kNone : it->second;
}

const std::vector<CellAddr>& DependencyGraph::dependents(const CellAddr& cell) const {
    auto it = reverse_.find(cell);
    return it == reverse_.end() ? kNone : it->second;
}

std::vector<CellAddr> DependencyGraph::nodes() const {
    std::set<CellAddr> all;
    for (const auto& [f, ps] : forward_) {
        all.insert(f);
        all.insert(ps.begin(), ps.end());
    }
    return {all.begin(), all.end()};
}

std::vector<CellAddr> DependencyGraph::formula_nodes() const {
    std::vector<CellAddr> out;
    for (const auto& [f, _] : forward_) out.push_back(f);
    return out;
}

std::size_t DependencyGraph::edge_count() const {
    std::size_t n = 0;
    for (const auto& [_, ps] : forward_) n += ps.size();
    return n;
}

DependencyGraph build_graph(const Workbook& wb) {
    DependencyGraph g;
    using Code = Diagnostic::Code;

    for (const Cell* cell : wb.formula_cells()) {
        const CellAddr& host = cell->addr;
        const Formula& f = *cell->formula();
        auto& edges = g.forward_[host];
        if (!f.tree) {
            g.diagnostics_.push_back({host, Code::ParseError, f.parse_error, std::nullopt});
            continue;
        }

        std::set<CellAddr> seen;
        std::set<CellAddr> blank_reported;
        auto add_edge = [&](const CellAddr& a) {
            if (seen.insert(a).second) edges.push_back(a);
        };
        // Returns false when the reference cannot be followed.
        auto check_sheet = [&](const CellRef& r) {
            if (!r.sheet || *r.sheet == host.sheet) return true;
            if (!wb.has_sheet(*r.sheet)) {
                g.diagnostics_.push_back({host, Code::BrokenReference, "unknown sheet '" + *r.sheet + "'", std::nullopt});
                return false;
            }
            g.diagnostics_.push_back({host, Code::CrossSheetReference, *r.sheet, std::nullopt});
            return true;
        };

        walk(*f.tree, [&](const Expr& e) {
            if (auto* r = std::get_if<Ref>(&e.node)) {
                CellAddr a = r->ref.resolve(host.sheet);
                if (!a.in_bounds()) {
                    g.diagnostics_.push_back({host, Code::BrokenReference, "out of bounds " + a.a1(), std::nullopt});
                    return;
                }
                if (!check_sheet(r->ref)) return;
                add_edge(a);
                if (stored_blank(wb, a) && blank_reported.insert(a).second)
                    g.diagnostics_.push_back({host, Code::BlankPrecedent, a.qualified(), a});
            } else if (auto* rr = std::get_if<RangeRef>(&e.node)) {
                CellAddr lo = rr->start.resolve(host.sheet), hi = rr->end.resolve(host.sheet);
                if (!lo.in_bounds() || !hi.in_bounds()) {
                    g.diagnostics_.push_back(
                        {host, Code::BrokenReference, "out of bounds " + lo.a1() + ":" + hi.a1(), std::nullopt});
                    return;
                }
                if (!check_sheet(rr->start)) return;
                auto rows = static_cast<std::size_t>(hi.row - lo.row + 1);
                auto cols = static_cast<std::size_t>(hi.col - lo.col + 1);
                if (rows * cols > kMaxRangeCells) {
                    g.diagnostics_.push_back({host, Code::RangeTooLarge,
                                              fmt::format("{}:{} has {} cells", lo.a1(), hi.a1(), rows * cols),
                                              std::nullopt});
                    return;
                }
                for (int row = lo.row; row <= hi.row; ++row)
                    for (int col = lo.col; col <= hi.col; ++col) add_edge(CellAddr{lo.sheet, col, row});
            } else if (auto* el = std::get_if<ErrorLit>(&e.node)) {
                if (el->code == errors::kRef.code)
                    g.diagnostics_.push_back({host, Code::BrokenReference, "#REF! in formula", std::nullopt});
            } else if (auto* c = std::get_if<Call>(&e.node)) {
                if (!detail::kSupportedFunctions.contains(c->name))
                    g.diagnostics_.push_back({host, Code::UnsupportedFunction, c->name, std::nullopt});
            }
        });
    }

    for (const auto& [f, ps] : g.forward_) {
        for (const auto& p : ps) {
            g.reverse_[p].push_back(f);
            if (!wb.find(p)) g.virtual_blanks_.insert(p);
        }
    }
    // forward_ iterates in address order, so each reverse list is already sorted.
    return g;
}

std::vector<std::vector<CellAddr>> detect_cycles(const DependencyGraph& g) {
    // Iterative Tarjan over formula cells; constants cannot be on a cycle.
    const auto formulas = g.formula_nodes();
    std::map<CellAddr, std::size_t> id;
    for (std::size_t i = 0; i < formulas.size(); ++i) id[formulas[i]] = i;

    std::vector<std::vector<std::size_t>> adj(formulas.size());
    std::vector<bool> self_loop(formulas.size(), false);
    for (std::size_t i = 0; i < formulas.size(); ++i) {
        for (const auto& p : g.precedents(formulas[i])) {
            auto it = id.find(p);
            if (it == id.end()) continue;
            if (it->second == i) self_loop[i] = true;
            adj[i].push_back(it->second);
        }
    }

    constexpr std::size_t kUnvisited = static_cast<std::size_t>(-1);
    std::vector<std::size_t> index(formulas.size(), kUnvisited), low(formulas.size(), 0);
    std::vector<bool> on_stack(formulas.size(), false);
    std::vector<std::size_t> stack;
    std::size_t counter = 0;
    std::vector<std::vector<CellAddr>> cycles;

    for (std::size_t root = 0; root < formulas.size(); ++root) {
        if (index[root] != kUnvisited) continue;
        std::vector<std::pair<std::size_t, std::size_t>> frames{{root, 0}};
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!frames.empty()) {
            auto& [v, next] = frames.back();
            if (next < adj[v].size()) {
                std::size_t w = adj[v][next++];
                if (index[w] == kUnvisited) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    frames.emplace_back(w, 0);
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            std::size_t done = v;
            frames.pop_back();
            if (!frames.empty()) low[frames.back().first] = std::min(low[frames.back().first], low[done]);
            if (low[done] != index[done]) continue;
            std::vector<std::size_t> comp;
            std::size_t w;
            do {
                w = stack.back();
                stack.pop_back();
                on_stack[w] = false;
                comp.push_back(w);
            } while (w != done);
            if (comp.size() < 2 && !self_loop[done]) continue;

            // Order members along the edges starting from the smallest address,
            // so the cycle reads as a path; members off that path follow sorted.
            std::set<std::size_t> members(comp.begin(), comp.end());
            std::size_t start = *std::min_element(comp.begin(), comp.end());
            std::vector<CellAddr> cycle{formulas[start]};
            std::set<std::size_t> used{start};
            std::size_t cur = start;
            for (bool moved = true; moved;) {
                moved = false;
                std::optional<std::size_t> best;
                for (std::size_t nxt : adj[cur])
                    if (members.contains(nxt) && !used.contains(nxt) && (!best || nxt < *best)) best = nxt;
                if (best) {
                    used.insert(*best);
                    cycle.push_back(formulas[*best]);
                    cur = *best;
                    moved = true;
                }
            }
            for (std::size_t m : members)
                if (!used.contains(m)) cycle.push_back(formulas[m]);
            cycles.push_back(std::move(cycle));
        }
    }
    std::sort(cycles.begin(), cycles.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return cycles;
}

}  // namespace erfr
