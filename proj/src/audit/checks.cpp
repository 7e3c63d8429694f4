#include "internal.hpp"

#include <algorithm>
#include <fmt/format.h>

namespace erfr {
namespace {

using detail::within;

bool nonempty_text(const Workbook& wb, const CellAddr& a) {
    const Cell* c = wb.find(a);
    if (!c || c->is_formula()) return false;
    const auto* s = std::get_if<std::string>(c->constant());
    return s && s->find_first_not_of(" \t\r\n") != std::string::npos;
}

/// Constant (or referenced empty) cells read by at least one formula.
std::set<CellAddr> input_cells(const Workbook& wb, const DependencyGraph& g) {
    std::set<CellAddr> out(g.virtual_blanks().begin(), g.virtual_blanks().end());
    for (const Cell* c : wb.cells()) {
        if (c->is_formula() || is_text(*c->constant())) continue;
        if (!g.dependents(c->addr).empty()) out.insert(c->addr);
    }
    return out;
}

std::string vector_name(int k) {
    static const char* names[] = {"inputs x1.5", "inputs x0.75", "integer inputs +7"};
    return names[k];
}

}  // namespace

std::vector<Finding> check_hardwired(const Workbook& wb) {
    std::vector<Finding> out;
    for (const Cell* c : wb.formula_cells()) {
        const Formula& f = *c->formula();
        if (!f.tree) continue;
        for (const auto& site : literal_sites(*f.tree)) {
            double v = site.value;
            if (v == -1 || v == 0 || v == 1) continue;
            const auto& ctx = site.context;
            // ROUND's digit count is not a model quantity.
            if (ctx.kind == LiteralContext::Kind::Call && ctx.op == "ROUND" && ctx.index == 1) continue;
            bool percent = v == 100 && ctx.kind == LiteralContext::Kind::Binary &&
                           (ctx.op == "*" || (ctx.op == "/" && ctx.index == 1));
            if (percent) {
                out.push_back(make_finding(codes::kHardwiredPercentConversion, {c->addr},
                                           fmt::format("{} converts a percentage with the literal 100 in {}",
                                                       c->addr.a1(), f.canonical())));
            } else {
                out.push_back(make_finding(codes::kHardwiredNumber, {c->addr},
                                           fmt::format("literal {} in {} {}", format_number(v), c->addr.a1(),
                                                       f.canonical())));
            }
        }
    }
    return out;
}

std::vector<Finding> check_labels(const Workbook& wb, const DependencyGraph& g) {
    std::set<CellAddr> checked = input_cells(wb, g);
    for (const Cell* c : wb.formula_cells()) checked.insert(c->addr);

    std::vector<Finding> out;
    for (const auto& a : checked) {
        if (a.col > 1 && nonempty_text(wb, CellAddr{a.sheet, a.col - 1, a.row})) continue;
        // A heading above, possibly over a run of other checked cells (a table column).
        bool labelled = false;
        for (int row = a.row - 1; row >= 1; --row) {
            CellAddr up{a.sheet, a.col, row};
            if (nonempty_text(wb, up)) {
                labelled = true;
                break;
            }
            if (!checked.contains(up)) break;
        }
        if (labelled) continue;
        out.push_back(make_finding(codes::kUnlabeledCell, {a},
                                   fmt::format("{} {} has no label to its left or above", a.a1(),
                                               g.is_formula(a) ? "formula" : "input")));
    }
    return out;
}

std::vector<Finding> check_structure(const Workbook& wb, const DependencyGraph& g) {
    std::vector<Finding> out;
    std::set<std::pair<std::string, std::vector<CellAddr>>> seen;
    auto push = [&](std::string_view code, std::vector<CellAddr> cells, std::string message) {
        if (!seen.emplace(std::string(code), cells).second) return;
        out.push_back(make_finding(code, std::move(cells), std::move(message)));
    };
    using Code = Diagnostic::Code;
    for (const auto& d : g.diagnostics()) {
        switch (d.code) {
            case Code::ParseError:
                push(codes::kFormulaParseError, {d.addr},
                     fmt::format("{} does not parse: {}", d.addr.a1(), d.detail));
                break;
            case Code::BrokenReference:
                push(codes::kBrokenReference, {d.addr}, fmt::format("{}: {}", d.addr.a1(), d.detail));
                break;
            case Code::CrossSheetReference:
                push(codes::kUnsupportedRef, {d.addr},
                     fmt::format("{} reads sheet '{}'; cross-sheet models are only partly audited", d.addr.a1(),
                                 d.detail));
                break;
            case Code::RangeTooLarge:
                push(codes::kUnsupportedRef, {d.addr}, fmt::format("{}: {}", d.addr.a1(), d.detail));
                break;
            case Code::UnsupportedFunction:
                push(codes::kUnsupportedFunction, {d.addr},
                     fmt::format("{} calls {}, which is not evaluated", d.addr.a1(), d.detail));
                break;
            case Code::BlankPrecedent:
                push(codes::kBlankPrecedent, {*d.related, d.addr},
                     fmt::format("{} reads the empty cell {}", d.addr.a1(), d.related->a1()));
                break;
            default: break;
        }
    }
    for (const auto& cycle : detect_cycles(g)) {
        std::string path;
        for (const auto& a : cycle) path += a.a1() + " -> ";
        push(codes::kCircularReference, cycle, "circular reference " + path + cycle.front().a1());
    }
    if (wb.formula_cells().empty())
        push(codes::kNoFormulas, {}, "the workbook contains no cell formulas");
    return out;
}

std::vector<Finding> check_orphans(const Workbook& wb, const DependencyGraph& g) {
    std::vector<Finding> out;
    if (wb.formula_cells().empty()) return out;
    auto tables = detect_tables(wb);
    std::vector<CellAddr> orphans;
    for (const Cell* c : wb.cells()) {
        if (c->is_formula() || !is_number(*c->constant())) continue;
        if (!g.dependents(c->addr).empty()) continue;
        if (label_of(wb, c->addr, tables).empty()) continue;
        orphans.push_back(c->addr);
    }
    // Group vertical runs so a column of unused numbers is one finding.
    std::sort(orphans.begin(), orphans.end(), [](const CellAddr& a, const CellAddr& b) {
        return std::tie(a.sheet, a.col, a.row) < std::tie(b.sheet, b.col, b.row);
    });
    std::vector<std::vector<CellAddr>> runs;
    for (const auto& a : orphans) {
        if (!runs.empty()) {
            const auto& last = runs.back().back();
            if (last.sheet == a.sheet && last.col == a.col && last.row + 1 == a.row) {
                runs.back().push_back(a);
                continue;
            }
        }
        runs.push_back({a});
    }
    std::sort(runs.begin(), runs.end(), [](const auto& x, const auto& y) { return x.front() < y.front(); });
    for (auto& run : runs) {
        std::string where = run.size() == 1 ? run.front().a1() : run.front().a1() + ":" + run.back().a1();
        out.push_back(make_finding(codes::kOrphanInput, run,
                                   fmt::format("labelled value{} {} feed{} no formula", run.size() == 1 ? "" : "s",
                                               where, run.size() == 1 ? "s" : "")));
    }
    return out;
}

std::vector<Finding> check_reusability(const Workbook& wb, const ProblemSpec& spec, const InputBindings& inputs,
                                       OutputBindings& outputs) {
    std::vector<Finding> out;
    DependencyGraph g = build_graph(wb);
    const int rows = inputs.table ? inputs.table->body_rows() : 0;
    auto vectors = perturbation_vectors(spec, inputs.base);
    for (const auto& b : inputs.bindings) {
        // Inputs the workbook has no cell for cannot be varied.
        if (b.cells.empty())
            for (auto& v : vectors) v[b.name] = inputs.base.at(b.name);
    }

    struct Track {
        bool base_ok = true;
        std::vector<std::string> misses;          // scalar outputs
        std::map<CellAddr, int> row_misses;       // per-row formula cells
    };
    std::map<std::string, Track> track;

    for (int k = -1; k < detail::kVectors; ++k) {
        Assignment assignment = k < 0 ? inputs.base : vectors[static_cast<std::size_t>(k)];
        auto row_values = inputs.row_values;
        EvalOptions options;
        options.overrides = inputs.base_overrides;
        if (k >= 0) {
            for (const auto& b : inputs.bindings) {
                const InputSpec& in = *spec.input(b.name);
                if (b.method == BindMethod::TableColumn) {
                    auto& vals = row_values[b.name];
                    for (std::size_t r = 0; r < vals.size(); ++r) {
                        vals[r] = detail::perturb(k, vals[r], in.domain);
                        options.overrides[b.cells[r]] = vals[r];
                    }
                    assignment[b.name] = vals.front();
                } else if (!b.cells.empty()) {
                    options.overrides[b.cells.front()] = encode(b.encoding, assignment.at(b.name));
                }
            }
        }
        EvalResult res = evaluate(wb, g, options);
        detail::OracleFrame oracle = detail::oracle_frame(spec, assignment, row_values, rows);

        for (const auto& b : outputs.bindings) {
            Track& t = track[b.name];
            if (b.method == BindMethod::TableColumn) {
                for (std::size_t r = 0; r < b.cells.size() && r < oracle.rows.size(); ++r) {
                    const CellAddr& a = b.cells[r];
                    if (detail::is_constant_cell(wb, a)) continue;
                    auto v = res.number(a);
                    if (!v || !within(*v, oracle.rows[r].at(b.name), spec.tolerance)) {
                        if (k < 0) t.base_ok = false;
                        else ++t.row_misses[a];
                    }
                }
                continue;
            }
            const CellAddr& a = b.cells.front();
            double want = oracle.scalar.at(b.name);
            auto v = res.number(a);
            if (v && within(*v, want, spec.tolerance)) continue;
            if (k < 0) {
                t.base_ok = false;
            } else {
                t.misses.push_back(fmt::format("{}: {} vs oracle {}", vector_name(k), detail::fmt_value(res.value(a)),
                                               format_number(want)));
            }
        }
    }

    for (auto& b : outputs.bindings) {
        const Track& t = track[b.name];
        if (b.method == BindMethod::TableColumn) {
            std::vector<CellAddr> bad;
            bool any_formula = false;
            for (const auto& a : b.cells) {
                any_formula = any_formula || !detail::is_constant_cell(wb, a);
                if (t.row_misses.contains(a)) bad.push_back(a);
            }
            if (!bad.empty()) {
                out.push_back(make_finding(codes::kOutputNotTracking, bad,
                                           fmt::format("{} of the '{}' formulas do not follow input changes",
                                                       bad.size(), b.name)));
            }
            b.confirmed = any_formula && t.base_ok && bad.empty() &&
                          std::none_of(b.cells.begin(), b.cells.end(),
                                       [&](const CellAddr& a) { return detail::is_constant_cell(wb, a); });
            continue;
        }
        const CellAddr& a = b.cells.front();
        if (detail::is_constant_cell(wb, a)) {
            out.push_back(make_finding(
                codes::kOutputIsConstant, {a},
                fmt::format("output '{}' in {} is the constant {}; it cannot follow input changes", b.name, a.a1(),
                            detail::fmt_value(wb.constant_at(a)))));
            b.confirmed = false;
            continue;
        }
        if (!t.misses.empty()) {
            out.push_back(make_finding(codes::kOutputNotTracking, {a},
                                       fmt::format("output '{}' in {} does not follow input changes ({})", b.name,
                                                   a.a1(), t.misses.front())));
            b.confirmed = false;
            continue;
        }
        b.confirmed = t.base_ok;
        if (b.confirmed && b.method == BindMethod::Value) b.method = BindMethod::PerturbationConfirmed;
    }
    return out;
}

std::vector<Finding> check_accuracy(const Workbook& wb, const ProblemSpec& spec, const InputBindings& inputs,
                                    const OutputBindings& outputs) {
    std::vector<Finding> out;
    for (const auto& b : inputs.bindings) {
        const InputSpec& in = *spec.input(b.name);
        if (b.method == BindMethod::TableColumn) {
            std::vector<CellAddr> bad;
            const auto& vals = inputs.row_values.at(b.name);
            for (std::size_t r = 0; r < vals.size(); ++r)
                if (!in.domain.contains(vals[r])) bad.push_back(b.cells[r]);
            if (!bad.empty())
                out.push_back(make_finding(codes::kInputOutOfDomain, bad,
                                           fmt::format("{} values of input '{}' lie outside [{}, {}]", bad.size(),
                                                       b.name, format_number(in.domain.min),
                                                       format_number(in.domain.max))));
            continue;
        }
        if (b.method == BindMethod::Default) continue;
        double v = inputs.base.at(b.name);
        if (!in.domain.contains(v))
            out.push_back(make_finding(codes::kInputOutOfDomain, b.cells,
                                       fmt::format("input '{}' = {} lies outside [{}, {}]", b.name, format_number(v),
                                                   format_number(in.domain.min), format_number(in.domain.max))));
    }

    EvalOptions options;
    options.overrides = inputs.base_overrides;
    EvalResult res = evaluate(wb, options);
    const int rows = inputs.table ? inputs.table->body_rows() : 0;
    detail::OracleFrame oracle = detail::oracle_frame(spec, inputs.base, inputs.row_values, rows);
    for (const auto& b : outputs.bindings) {
        if (b.method == BindMethod::TableColumn) continue;  // checked row by row with the table
        const CellAddr& a = b.cells.front();
        double want = oracle.scalar.at(b.name);
        auto v = res.number(a);
        if (v && within(*v, want, spec.tolerance)) continue;
        out.push_back(make_finding(codes::kWrongValue, {a},
                                   fmt::format("output '{}' in {}: {} vs {}", b.name, a.a1(),
                                               detail::fmt_value(res.value(a)), format_number(want))));
    }
    return out;
}

std::vector<Finding> check_table_columns(const TableRegion& table, const ProblemSpec& spec, const Workbook& wb,
                                         const InputBindings& inputs, const OutputBindings& outputs) {
    std::vector<Finding> out;
    EvalOptions options;
    options.overrides = inputs.base_overrides;
    EvalResult res = evaluate(wb, options);
    detail::OracleFrame oracle = detail::oracle_frame(spec, inputs.base, inputs.row_values, table.body_rows());

    std::set<int> explained;  // columns accounted for by the spec
    for (const auto& b : inputs.bindings)
        if (b.method == BindMethod::TableColumn) explained.insert(b.cells.front().col);

    for (const auto& o : spec.outputs) {
        if (!o.per_row) continue;
        const Binding* b = outputs.find(o.name);
        if (!b || b->method != BindMethod::TableColumn) continue;
        const int col = b->cells.front().col;
        explained.insert(col);
        for (std::size_t r = 0; r < b->cells.size(); ++r) {
            const CellAddr& a = b->cells[r];
            const Cell* cell = wb.find(a);
            if (!cell || !cell->is_formula()) {
                out.push_back(make_finding(codes::kOutputIsConstant, {a},
                                           fmt::format("'{}' in {} is the constant {}, not a formula", o.name,
                                                       a.a1(), detail::fmt_value(wb.constant_at(a)))));
            } else if (const auto& tree = cell->formula()->tree) {
                for (const auto& p : references_of(*tree, a.sheet)) {
                    if (table.contains_body(p) && p.row != a.row) {
                        out.push_back(make_finding(codes::kRowReferenceMismatch, {a},
                                                   fmt::format("{} reads {} from another row", a.a1(), p.a1())));
                        break;
                    }
                }
            }
            if (r >= oracle.rows.size()) continue;
            double want = oracle.rows[r].at(o.name);
            auto v = res.number(a);
            if (!v || !within(*v, want, spec.tolerance))
                out.push_back(make_finding(codes::kWrongValue, {a},
                                           fmt::format("'{}' in {}: {} vs {}", o.name, a.a1(),
                                                       detail::fmt_value(res.value(a)), format_number(want))));
        }

        // Totals of this column.
        for (const auto& total : spec.outputs) {
            if (total.aggregate_of != o.name) continue;
            const Binding* tb = outputs.find(total.name);
            if (!tb || tb->cells.empty()) continue;
            const CellAddr& t = tb->cells.front();
            const Cell* cell = wb.find(t);
            if (!cell || !cell->is_formula()) {
                out.push_back(make_finding(codes::kTotalNotFormula, {t},
                                           fmt::format("total '{}' in {} is a typed number", total.name, t.a1())));
                continue;
            }
            if (!cell->formula()->tree) continue;
            bool aggregates = false;
            for (const auto& rr : range_nodes(*cell->formula()->tree)) {
                CellAddr lo = rr.start.resolve(t.sheet), hi = rr.end.resolve(t.sheet);
                if (lo.sheet == table.sheet && lo.col <= col && hi.col >= col && lo.row <= table.first_row &&
                    hi.row >= table.last_row)
                    aggregates = true;
            }
            auto fns = function_names(*cell->formula()->tree);
            aggregates = aggregates && std::find(fns.begin(), fns.end(), "SUM") != fns.end();
            if (!aggregates) {
                out.push_back(make_finding(
                    codes::kTotalNotAggregating, {t},
                    fmt::format("total '{}' in {} does not sum column {} rows {}-{}", total.name, t.a1(),
                                column_name(col), table.first_row, table.last_row)));
            } else if (std::all_of(b->cells.begin(), b->cells.end(),
                                   [&](const CellAddr& a) { return detail::is_constant_cell(wb, a); })) {
                out.push_back(make_finding(codes::kTotalAggregatesConstants, {t},
                                           fmt::format("{} {} is a formula but sums typed numbers", t.a1(),
                                                       cell->formula()->canonical())));
            }
        }
    }

    // Formula columns that compute nothing the problem asks for.
    for (const auto& c : table.columns) {
        if (c.kind != TableRegion::ColumnKind::Formula || explained.contains(c.col)) continue;
        std::vector<CellAddr> cells;
        int meaningful = 0;
        for (int row = table.first_row; row <= table.last_row; ++row) {
            CellAddr a{table.sheet, c.col, row};
            const Cell* cell = wb.find(a);
            if (!cell || !cell->is_formula() || !cell->formula()->tree) continue;
            cells.push_back(a);
            auto refs = references_of(*cell->formula()->tree, a.sheet);
            bool all_blank = !refs.empty() && std::all_of(refs.begin(), refs.end(), [&](const CellAddr& p) {
                return is_blank(res.value(p)) && !inputs.base_overrides.contains(p);
            });
            if (all_blank) continue;
            auto v = res.number(a);
            if (!v) continue;
            std::vector<double> quantities;
            std::size_t r = static_cast<std::size_t>(row - table.first_row);
            for (const auto& [name, val] : inputs.base) quantities.push_back(val);
            for (const auto& [name, vals] : inputs.row_values) quantities.push_back(vals[r]);
            if (r < oracle.rows.size())
                for (const auto& [name, val] : oracle.rows[r]) quantities.push_back(val);
            for (const auto& [name, val] : oracle.scalar) quantities.push_back(val);
            if (std::any_of(quantities.begin(), quantities.end(),
                            [&](double q) { return within(*v, q, spec.tolerance); }))
                ++meaningful;
        }
        if (cells.empty() || meaningful >= 0.8 * static_cast<double>(cells.size())) continue;
        out.push_back(make_finding(codes::kExtraneousFormulaColumn, cells,
                                   fmt::format("formula column {} ({} cells) computes no quantity of the problem",
                                               column_name(c.col), cells.size())));
    }
    return out;
}

}  // namespace erfr
