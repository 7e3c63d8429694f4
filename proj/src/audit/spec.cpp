#include "erfr/spec.hpp"

#include "erfr/recalc.hpp"

#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <set>

namespace erfr {

bool Domain::contains(double v) const {
    if (v < min || v > max) return false;
    return !integer || v == std::round(v);
}

double Domain::clamp(double v) const {
    if (integer) v = std::round(v);
    return std::min(max, std::max(min, v));
}

std::string_view to_string(Encoding e) {
    switch (e) {
        case Encoding::Identity: return "identity";
        case Encoding::Percent: return "percent";
        case Encoding::OnePlus: return "one_plus";
    }
    return "?";
}

double encode(Encoding e, double v) {
    switch (e) {
        case Encoding::Percent: return v * 100;
        case Encoding::OnePlus: return 1 + v;
        default: return v;
    }
}

double decode(Encoding e, double stored) {
    switch (e) {
        case Encoding::Percent: return stored / 100;
        case Encoding::OnePlus: return stored - 1;
        default: return stored;
    }
}

DomainViolation::DomainViolation(const std::string& name, double v)
    : std::runtime_error(fmt::format("input '{}' = {} is outside its domain", name, format_number(v))) {}

const InputSpec* ProblemSpec::input(std::string_view name) const {
    for (const auto& i : inputs)
        if (i.name == name) return &i;
    return nullptr;
}

const OutputSpec* ProblemSpec::output(std::string_view name) const {
    for (const auto& o : outputs)
        if (o.name == name) return &o;
    return nullptr;
}

void ProblemSpec::compile() {
    std::set<std::string, std::less<>> declared;
    for (const auto& i : inputs) declared.insert(i.name);
    for (auto& o : outputs) {
        try {
            o.oracle = parse_oracle(o.oracle_text, declared);
        } catch (const FormulaError& e) {
            throw SpecError(fmt::format("spec '{}': oracle of '{}': {}", id, o.name, e.what()));
        }
        declared.insert(o.name);
    }
    validate();
}

void ProblemSpec::validate() const {
    if (id.empty()) throw SpecError("spec without id");
    std::set<std::string, std::less<>> names;
    for (const auto& i : inputs) {
        if (i.name.empty()) throw SpecError(fmt::format("spec '{}': input without name", id));
        if (!names.insert(i.name).second) throw SpecError(fmt::format("spec '{}': duplicate name '{}'", id, i.name));
        if (i.patterns.empty()) throw SpecError(fmt::format("spec '{}': input '{}' has no label patterns", id, i.name));
        if (i.domain.min > i.domain.max) throw SpecError(fmt::format("spec '{}': input '{}' has an empty domain", id, i.name));
        if (!i.domain.contains(i.default_value))
            throw SpecError(fmt::format("spec '{}': default of '{}' lies outside its domain", id, i.name));
    }
    std::set<std::string, std::less<>> known = names;
    for (const auto& o : outputs) {
        if (!names.insert(o.name).second) throw SpecError(fmt::format("spec '{}': duplicate name '{}'", id, o.name));
        if (o.patterns.empty()) throw SpecError(fmt::format("spec '{}': output '{}' has no label patterns", id, o.name));
        if (!o.oracle) throw SpecError(fmt::format("spec '{}': output '{}' is not compiled", id, o.name));
        if (!o.aggregate_of.empty()) {
            const OutputSpec* base = output(o.aggregate_of);
            if (!base || !base->per_row)
                throw SpecError(fmt::format("spec '{}': '{}' aggregates unknown per-row output '{}'", id, o.name,
                                            o.aggregate_of));
        }
        known.insert(o.name);
    }
    if (!(tolerance > 0)) throw SpecError(fmt::format("spec '{}': tolerance must be positive", id));
}

Assignment eval_oracle_unchecked(const ProblemSpec& spec, const Assignment& inputs) {
    Assignment vars = inputs;
    Assignment out;
    for (const auto& o : spec.outputs) {
        CellValue v = evaluate_expression(*o.oracle, vars);
        double d = number_of(v).value_or(std::numeric_limits<double>::quiet_NaN());
        out[o.name] = d;
        vars[o.name] = d;
    }
    return out;
}

Assignment eval_oracle(const ProblemSpec& spec, const Assignment& inputs) {
    for (const auto& i : spec.inputs) {
        auto it = inputs.find(i.name);
        if (it == inputs.end()) throw MissingInput(i.name);
        if (!i.domain.contains(it->second)) throw DomainViolation(i.name, it->second);
    }
    return eval_oracle_unchecked(spec, inputs);
}

Assignment default_assignment(const ProblemSpec& spec) {
    Assignment a;
    for (const auto& i : spec.inputs) a[i.name] = i.default_value;
    return a;
}

}  // namespace erfr
