#include "erfr/recalc.hpp"

#include "interpreter.hpp"

#include <algorithm>
#include <random>

namespace erfr {
namespace {

constexpr std::size_t kDenseRangeLimit = 4096;

class Evaluator {
public:
    Evaluator(const Workbook& wb, const EvalOptions& options) : wb_(wb), overrides_(options.overrides) {}

    CellValue lookup(const CellAddr& a) const {
        if (auto it = computed_.find(a); it != computed_.end()) return it->second;
        if (auto it = overrides_.find(a); it != overrides_.end()) return it->second;
        return wb_.constant_at(a);
    }

    std::vector<CellValue> lookup_range(const RangeRef& r, const std::string& host_sheet) const {
        CellAddr lo = r.start.resolve(host_sheet), hi = r.end.resolve(host_sheet);
        if (!lo.in_bounds() || !hi.in_bounds() || (r.start.sheet && !wb_.has_sheet(lo.sheet)))
            return {errors::kRef};
        auto area = static_cast<std::size_t>(hi.row - lo.row + 1) * static_cast<std::size_t>(hi.col - lo.col + 1);
        if (area > kMaxRangeCells) return {errors::kRef};
        std::vector<CellValue> out;
        if (area <= kDenseRangeLimit) {
            for (int row = lo.row; row <= hi.row; ++row)
                for (int col = lo.col; col <= hi.col; ++col) out.push_back(lookup(CellAddr{lo.sheet, col, row}));
            return out;
        }
        // Sparse walk: aggregates ignore blanks, so only occupied cells matter.
        std::set<CellAddr> occupied;
        if (const Sheet* s = wb_.sheet(lo.sheet))
            for (const auto& [a, _] : s->cells) occupied.insert(a);
        for (const auto& [a, _] : overrides_)
            if (a.sheet == lo.sheet) occupied.insert(a);
        for (const auto& a : occupied)
            if (a.row >= lo.row && a.row <= hi.row && a.col >= lo.col && a.col <= hi.col) out.push_back(lookup(a));
        return out;
    }

    CellValue run(const CellAddr& host, const Expr& tree) const {
        detail::Interpreter in;
        in.cell = [&](const CellRef& r) -> CellValue {
            CellAddr a = r.resolve(host.sheet);
            if (!a.in_bounds() || (r.sheet && !wb_.has_sheet(a.sheet))) return errors::kRef;
            return lookup(a);
        };
        in.range = [&](const RangeRef& r) { return lookup_range(r, host.sheet); };
        return in.eval(tree);
    }

    void store(const CellAddr& a, CellValue v) { computed_[a] = std::move(v); }

private:
    const Workbook& wb_;
    const Overrides& overrides_;
    std::map<CellAddr, CellValue> computed_;
};

void sort_diagnostics(std::vector<Diagnostic>& ds) {
    std::stable_sort(ds.begin(), ds.end(), [](const Diagnostic& a, const Diagnostic& b) {
        if (a.addr != b.addr) return a.addr < b.addr;
        return a.code < b.code;
    });
}

}  // namespace

CellValue EvalResult::value(const CellAddr& a) const {
    auto it = values.find(a);
    return it == values.end() ? CellValue{Blank{}} : it->second;
}

std::optional<double> EvalResult::number(const CellAddr& a) const { return number_of(value(a)); }

bool operator==(const EvalResult& a, const EvalResult& b) {
    if (a.values.size() != b.values.size() || a.diagnostics != b.diagnostics) return false;
    auto ia = a.values.begin();
    for (auto ib = b.values.begin(); ib != b.values.end(); ++ia, ++ib)
        if (ia->first != ib->first || !identical(ia->second, ib->second)) return false;
    return true;
}

EvalResult evaluate(const Workbook& wb, const EvalOptions& options) {
    return evaluate(wb, build_graph(wb), options);
}

EvalResult evaluate(const Workbook& wb, const Overrides& overrides) {
    EvalOptions options;
    options.overrides = overrides;
    return evaluate(wb, options);
}

EvalResult evaluate(const Workbook& wb, const DependencyGraph& g, const EvalOptions& options) {
    for (const auto& [a, v] : options.overrides) {
        const Cell* c = wb.find(a);
        if (c && c->is_formula()) throw OverrideTargetsFormula(a);
    }

    EvalResult result;
    result.diagnostics = g.diagnostics();
    Evaluator ev(wb, options);

    // Cycle members are resolved up front; their dependents then see #CYCLE!.
    std::set<CellAddr> resolved;
    for (const auto& cycle : detect_cycles(g)) {
        std::string path;
        for (const auto& a : cycle) path += (path.empty() ? "" : " -> ") + a.qualified();
        for (const auto& a : cycle) {
            ev.store(a, errors::kCycle);
            resolved.insert(a);
            result.diagnostics.push_back({a, Diagnostic::Code::Cycle, path, std::nullopt});
        }
    }

    // Kahn's algorithm over the remaining formula cells.
    std::map<CellAddr, std::size_t> pending;
    for (const auto& f : g.formula_nodes()) {
        if (resolved.contains(f)) continue;
        std::size_t n = 0;
        for (const auto& p : g.precedents(f))
            if (g.is_formula(p) && !resolved.contains(p)) ++n;
        pending[f] = n;
    }
    std::vector<CellAddr> ready;
    for (const auto& [f, n] : pending)
        if (n == 0) ready.push_back(f);

    std::optional<std::mt19937_64> rng;
    if (options.shuffle_seed) rng.emplace(*options.shuffle_seed);

    while (!ready.empty()) {
        std::size_t pick = 0;
        if (rng) {
            pick = std::uniform_int_distribution<std::size_t>(0, ready.size() - 1)(*rng);
        } else {
            pick = static_cast<std::size_t>(std::min_element(ready.begin(), ready.end()) - ready.begin());
        }
        CellAddr f = ready[pick];
        ready.erase(ready.begin() + static_cast<std::ptrdiff_t>(pick));

        const Formula& formula = *wb.find(f)->formula();
        CellValue v = formula.tree ? ev.run(f, *formula.tree) : CellValue{errors::kName};
        if (auto* err = std::get_if<ErrorValue>(&v); err && formula.tree)
            result.diagnostics.push_back({f, Diagnostic::Code::ErrorValue, err->code, std::nullopt});
        ev.store(f, std::move(v));

        for (const auto& d : g.dependents(f)) {
            auto it = pending.find(d);
            if (it == pending.end()) continue;
            if (--it->second == 0) ready.push_back(d);
        }
    }

    for (const Cell* c : wb.cells()) result.values[c->addr] = ev.lookup(c->addr);
    for (const auto& [a, _] : options.overrides) result.values[a] = ev.lookup(a);
    sort_diagnostics(result.diagnostics);
    return result;
}

CellValue evaluate_expression(const Expr& tree, const std::map<std::string, double, std::less<>>& vars) {
    detail::Interpreter in;
    in.cell = [](const CellRef&) -> CellValue { return errors::kRef; };
    in.range = [](const RangeRef&) -> std::vector<CellValue> { return {errors::kRef}; };
    in.var = [&](const std::string& name) -> CellValue {
        auto it = vars.find(name);
        if (it == vars.end()) return errors::kName;
        return it->second;
    };
    return in.eval(tree);
}

}  // namespace erfr
