#include "internal.hpp"

#include <algorithm>
#include <fmt/format.h>

namespace erfr {
namespace detail {

LabelIndex::LabelIndex(const Workbook& wb, const ProblemSpec& spec, const DependencyGraph& g)
    : tables(detect_tables(wb)) {
    std::vector<std::pair<std::string, std::vector<std::vector<std::string>>>> names;
    auto add = [&](const std::string& name, const std::vector<std::string>& patterns) {
        std::vector<std::vector<std::string>> toks;
        for (const auto& p : patterns) toks.push_back(label_tokens(p));
        names.emplace_back(name, std::move(toks));
    };
    for (const auto& i : spec.inputs) add(i.name, i.patterns);
    for (const auto& o : spec.outputs) add(o.name, o.patterns);

    std::set<CellAddr> positions(g.virtual_blanks().begin(), g.virtual_blanks().end());
    for (const Cell* c : wb.cells()) {
        const CellValue* v = c->constant();
        if (v && is_text(*v)) continue;
        positions.insert(c->addr);
    }
    for (const auto& a : positions) {
        CellLabel label = label_of(wb, a, tables);
        if (label.empty()) continue;
        std::optional<MatchScore> best;
        std::vector<std::string> winners;
        for (const auto& [name, patterns] : names) {
            std::optional<MatchScore> score;
            for (const auto& p : patterns) {
                auto s = match_label(p, label);
                if (s && (!score || *s > *score)) score = s;
            }
            if (!score) continue;
            if (!best || *score > *best) {
                best = score;
                winners = {name};
            } else if (*score == *best) {
                winners.push_back(name);
            }
        }
        if (!winners.empty()) claims[a] = std::move(winners);
    }
}

std::vector<CellAddr> LabelIndex::claimed_by(std::string_view name) const {
    std::vector<CellAddr> out;
    for (const auto& [a, names] : claims)
        if (std::find(names.begin(), names.end(), name) != names.end()) out.push_back(a);
    return out;
}

OracleFrame oracle_frame(const ProblemSpec& spec, const Assignment& scalar,
                         const std::map<std::string, std::vector<double>, std::less<>>& row_values, int rows) {
    OracleFrame f;
    f.scalar = eval_oracle_unchecked(spec, scalar);
    if (rows <= 0 || row_values.empty()) return f;
    for (int r = 0; r < rows; ++r) {
        Assignment a = scalar;
        for (const auto& [name, vals] : row_values) a[name] = vals[static_cast<std::size_t>(r)];
        f.rows.push_back(eval_oracle_unchecked(spec, a));
    }
    for (const auto& o : spec.outputs) {
        if (o.aggregate_of.empty()) continue;
        double sum = 0;
        for (const auto& row : f.rows) sum += row.at(o.aggregate_of);
        f.scalar[o.name] = sum;
    }
    return f;
}

double perturb(int k, double v, const Domain& d) {
    switch (k) {
        case 0: return d.clamp(v * 1.5);
        case 1: return d.clamp(v * 0.75);
        default: return d.integer ? d.clamp(v + 7) : v;
    }
}

bool is_constant_cell(const Workbook& wb, const CellAddr& a) {
    const Cell* c = wb.find(a);
    return !c || !c->is_formula();
}

std::string fmt_value(const CellValue& v) {
    if (is_blank(v)) return "(blank)";
    return display(v);
}

}  // namespace detail

namespace {

using detail::LabelIndex;

bool input_eligible(const Workbook& wb, const CellAddr& a) {
    const Cell* c = wb.find(a);
    if (!c) return true;  // referenced but empty
    const CellValue* v = c->constant();
    return v && (is_blank(*v) || is_number(*v));
}

bool output_eligible(const Workbook& wb, const CellAddr& a) {
    const Cell* c = wb.find(a);
    if (!c) return false;
    if (c->is_formula()) return true;
    return is_number(*c->constant());
}

std::string cells_text(const std::vector<CellAddr>& cells) {
    std::string out;
    for (const auto& a : cells) out += (out.empty() ? "" : ", ") + a.a1();
    return out;
}

// Stored value of a rate input may be 0.2, 20 or 1.2 for a default of 0.2.
Encoding detect_encoding(const InputSpec& in, double stored) {
    if (!in.rate) return Encoding::Identity;
    for (Encoding e : {Encoding::Identity, Encoding::Percent, Encoding::OnePlus})
        if (detail::within(decode(e, stored), in.default_value, 1e-9)) return e;
    return Encoding::Identity;
}

std::vector<double> encodings_of(const InputSpec& in) {
    std::vector<double> out{in.default_value};
    if (in.rate) {
        out.push_back(encode(Encoding::Percent, in.default_value));
        out.push_back(encode(Encoding::OnePlus, in.default_value));
    }
    return out;
}

}  // namespace

const Binding* InputBindings::find(std::string_view name) const {
    for (const auto& b : bindings)
        if (b.name == name) return &b;
    return nullptr;
}

const Binding* OutputBindings::find(std::string_view name) const {
    for (const auto& b : bindings)
        if (b.name == name) return &b;
    return nullptr;
}

InputBindings bind_inputs(const Workbook& wb, const ProblemSpec& spec, const DependencyGraph& g) {
    LabelIndex index(wb, spec, g);
    InputBindings out;
    const bool tables_allowed = spec.layout == Layout::DailyTableAllowed;
    std::vector<bool> resolved(spec.inputs.size(), false);
    out.bindings.resize(spec.inputs.size());

    for (std::size_t i = 0; i < spec.inputs.size(); ++i) {
        const InputSpec& in = spec.inputs[i];
        Binding& b = out.bindings[i];
        b.name = in.name;
        b.is_input = true;
        b.method = BindMethod::Default;
        out.base[in.name] = in.default_value;

        std::vector<CellAddr> matches;
        for (const auto& a : index.claimed_by(in.name))
            if (input_eligible(wb, a)) matches.push_back(a);
        if (matches.empty()) continue;
        resolved[i] = true;

        if (matches.size() > 1 && tables_allowed) {
            const TableRegion* table = nullptr;
            for (const auto& t : index.tables)
                if (t.contains_body(matches.front())) table = &t;
            bool one_column = table && std::all_of(matches.begin(), matches.end(), [&](const CellAddr& a) {
                return table->contains_body(a) && a.col == matches.front().col;
            });
            if (one_column && (!out.table || *out.table == *table)) {
                out.table = *table;
                b.method = BindMethod::TableColumn;
                std::vector<double> values;
                for (int r = table->first_row; r <= table->last_row; ++r) {
                    CellAddr a{table->sheet, matches.front().col, r};
                    b.cells.push_back(a);
                    CellValue v = wb.constant_at(a);
                    if (auto d = number_of(v)) {
                        values.push_back(*d);
                    } else {
                        values.push_back(in.default_value);
                        out.base_overrides[a] = in.default_value;
                    }
                }
                b.note = fmt::format("column {} of the table at row {}", column_name(matches.front().col),
                                     table->header_row);
                out.base[in.name] = values.front();
                out.row_values[in.name] = std::move(values);
                continue;
            }
        }

        CellAddr chosen = matches.front();
        if (matches.size() > 1) {
            std::vector<CellAddr> feeding;
            for (const auto& a : matches)
                if (!g.dependents(a).empty()) feeding.push_back(a);
            if (feeding.size() >= 2) {
                out.findings.push_back(make_finding(
                    codes::kDuplicateInput, feeding,
                    fmt::format("input '{}' appears in {} cells that feed formulas: {}", in.name, feeding.size(),
                                cells_text(feeding))));
            }
            if (!feeding.empty()) chosen = feeding.front();
            b.note = fmt::format("{} candidate cells", matches.size());
        }
        b.method = BindMethod::Label;
        b.cells = {chosen};
        CellValue v = wb.constant_at(chosen);
        if (auto d = number_of(v)) {
            b.encoding = detect_encoding(in, *d);
            out.base[in.name] = decode(b.encoding, *d);
        } else {
            out.base_overrides[chosen] = in.default_value;
            if (b.note.empty()) b.note = "blank cell; default value assumed";
        }
    }

    // Inputs without a labelled cell: a daily table's row count, a literal
    // buried in a formula, or nothing at all.
    std::vector<LiteralSite> sites;
    std::vector<CellAddr> site_cells;
    for (const Cell* c : wb.formula_cells()) {
        if (!c->formula()->tree) continue;
        for (auto& s : literal_sites(*c->formula()->tree)) {
            sites.push_back(std::move(s));
            site_cells.push_back(c->addr);
        }
    }
    std::vector<bool> site_used(sites.size(), false);
    for (std::size_t i = 0; i < spec.inputs.size(); ++i) {
        if (resolved[i]) continue;
        const InputSpec& in = spec.inputs[i];
        Binding& b = out.bindings[i];
        if (in.row_count && out.table) {
            b.method = BindMethod::RowCount;
            b.note = fmt::format("{} body rows of the table at row {}", out.table->body_rows(), out.table->header_row);
            out.base[in.name] = out.table->body_rows();
            continue;
        }
        std::optional<std::size_t> hit;
        for (std::size_t s = 0; s < sites.size() && !hit; ++s) {
            if (site_used[s]) continue;
            for (double enc : encodings_of(in))
                if (detail::within(sites[s].value, enc, 1e-12)) hit = s;
        }
        if (hit) {
            site_used[*hit] = true;
            out.findings.push_back(make_finding(
                codes::kInputHardwired, {site_cells[*hit]},
                fmt::format("input '{}' is typed into the formula in {} as {} instead of residing in its own cell",
                            in.name, site_cells[*hit].a1(), format_number(sites[*hit].value))));
            b.note = "hardwired in " + site_cells[*hit].a1();
        } else {
            out.findings.push_back(make_finding(codes::kInputNotFound, {},
                                                fmt::format("no cell labelled as input '{}'", in.name)));
            b.note = "not found";
        }
    }
    return out;
}

OutputBindings bind_outputs(const Workbook& wb, const ProblemSpec& spec, const DependencyGraph& g,
                            const InputBindings& inputs) {
    LabelIndex index(wb, spec, g);
    OutputBindings out;

    std::set<CellAddr> taken;
    for (const auto& b : inputs.bindings) taken.insert(b.cells.begin(), b.cells.end());

    EvalOptions options;
    options.overrides = inputs.base_overrides;
    EvalResult base = evaluate(wb, g, options);
    const int rows = inputs.table ? inputs.table->body_rows() : 0;
    detail::OracleFrame oracle = detail::oracle_frame(spec, inputs.base, inputs.row_values, rows);

    std::vector<std::optional<Binding>> found(spec.outputs.size());
    for (std::size_t i = 0; i < spec.outputs.size(); ++i) {
        const OutputSpec& o = spec.outputs[i];
        std::vector<CellAddr> matches;
        for (const auto& a : index.claimed_by(o.name))
            if (output_eligible(wb, a) && !taken.contains(a)) matches.push_back(a);

        if (o.per_row && inputs.table) {
            const TableRegion& t = *inputs.table;
            std::optional<int> col;
            for (const auto& a : matches)
                if (t.contains_body(a)) col = col.value_or(a.col);
            if (!col) continue;
            Binding b;
            b.name = o.name;
            b.method = BindMethod::TableColumn;
            for (int r = t.first_row; r <= t.last_row; ++r) b.cells.emplace_back(t.sheet, *col, r);
            b.note = fmt::format("column {} of the table at row {}", column_name(*col), t.header_row);
            taken.insert(b.cells.begin(), b.cells.end());
            found[i] = std::move(b);
            continue;
        }
        if (matches.empty()) continue;

        // Among labelled candidates prefer the value closest to the oracle.
        double want = oracle.scalar.at(o.name);
        CellAddr chosen = matches.front();
        double best = std::numeric_limits<double>::infinity();
        for (const auto& a : matches) {
            auto v = base.number(a);
            if (!v || !std::isfinite(want)) continue;
            double d = std::abs(*v - want);
            if (d < best) {
                best = d;
                chosen = a;
            }
        }
        Binding b;
        b.name = o.name;
        b.method = BindMethod::Label;
        b.cells = {chosen};
        if (matches.size() > 1) b.note = fmt::format("{} labelled candidates", matches.size());
        taken.insert(chosen);
        found[i] = std::move(b);
    }

    // Value matching for outputs no label names.
    for (std::size_t i = 0; i < spec.outputs.size(); ++i) {
        const OutputSpec& o = spec.outputs[i];
        if (found[i] || (o.per_row && inputs.table)) continue;
        double want = oracle.scalar.at(o.name);
        std::optional<CellAddr> formula_hit, constant_hit;
        for (const auto& [a, v] : base.values) {
            if (taken.contains(a) || !output_eligible(wb, a)) continue;
            auto d = number_of(v);
            if (!d || !detail::within(*d, want, spec.tolerance)) continue;
            auto& slot = detail::is_constant_cell(wb, a) ? constant_hit : formula_hit;
            if (!slot) slot = a;
        }
        auto hit = formula_hit ? formula_hit : constant_hit;
        if (!hit) continue;
        Binding b;
        b.name = o.name;
        b.method = BindMethod::Value;
        b.cells = {*hit};
        b.note = "matched by value " + format_number(want);
        taken.insert(*hit);
        found[i] = std::move(b);
    }

    for (std::size_t i = 0; i < spec.outputs.size(); ++i) {
        const OutputSpec& o = spec.outputs[i];
        if (found[i]) {
            out.bindings.push_back(std::move(*found[i]));
            continue;
        }
        // A per-row quantity is optional when the workbook has no daily table.
        if (o.per_row && !inputs.table) continue;
        out.findings.push_back(make_finding(
            codes::kMissingOutput, {},
            fmt::format("no cell computes output '{}' (expected {})", o.name,
                        o.per_row ? std::string("a per-row column") : format_number(oracle.scalar.at(o.name)))));
    }
    return out;
}

std::vector<Assignment> perturbation_vectors(const ProblemSpec& spec, const Assignment& base) {
    std::vector<Assignment> out;
    for (int k = 0; k < detail::kVectors; ++k) {
        Assignment v;
        for (const auto& in : spec.inputs) {
            auto it = base.find(in.name);
            double b = it == base.end() ? in.default_value : it->second;
            v[in.name] = detail::perturb(k, b, in.domain);
        }
        out.push_back(std::move(v));
    }
    return out;
}

}  // namespace erfr
