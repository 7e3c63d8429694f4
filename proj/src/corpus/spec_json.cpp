#include "erfr/corpus.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

namespace erfr {

using nlohmann::ordered_json;

ProblemSpec spec_from_json(std::string_view text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const ordered_json::parse_error& e) {
        throw SpecError(std::string("spec is not valid JSON: ") + e.what());
    }
    try {
        ProblemSpec s;
        s.id = j.at("id").get<std::string>();
        s.statement = j.value("statement", "");
        s.tolerance = j.value("tolerance", 1e-9);
        std::string layout = j.value("layout", "scalar");
        if (layout == "scalar") s.layout = Layout::Scalar;
        else if (layout == "daily-table-allowed") s.layout = Layout::DailyTableAllowed;
        else throw SpecError("unknown layout '" + layout + "'");

        for (const auto& ji : j.at("inputs")) {
            InputSpec in;
            in.name = ji.at("name").get<std::string>();
            in.label = ji.value("label", in.name);
            in.patterns = ji.at("patterns").get<std::vector<std::string>>();
            in.default_value = ji.at("default").get<double>();
            const auto& d = ji.at("domain");
            in.domain = {d.at("min").get<double>(), d.at("max").get<double>(), d.value("integer", false)};
            in.unit = ji.value("unit", "");
            in.rate = ji.value("rate", false);
            in.row_count = ji.value("row_count", false);
            s.inputs.push_back(std::move(in));
        }
        for (const auto& jo : j.at("outputs")) {
            OutputSpec out;
            out.name = jo.at("name").get<std::string>();
            out.label = jo.value("label", out.name);
            out.patterns = jo.at("patterns").get<std::vector<std::string>>();
            out.oracle_text = jo.at("oracle").get<std::string>();
            out.per_row = jo.value("per_row", false);
            out.aggregate_of = jo.value("aggregate_of", "");
            s.outputs.push_back(std::move(out));
        }
        s.compile();
        return s;
    } catch (const ordered_json::exception& e) {
        throw SpecError(std::string("malformed spec: ") + e.what());
    }
}

std::string spec_to_json(const ProblemSpec& s) {
    ordered_json j;
    j["id"] = s.id;
    j["statement"] = s.statement;
    j["tolerance"] = s.tolerance;
    j["layout"] = s.layout == Layout::Scalar ? "scalar" : "daily-table-allowed";
    j["inputs"] = ordered_json::array();
    for (const auto& in : s.inputs) {
        ordered_json ji;
        ji["name"] = in.name;
        ji["label"] = in.label;
        ji["patterns"] = in.patterns;
        ji["default"] = in.default_value;
        ji["domain"] = {{"min", in.domain.min}, {"max", in.domain.max}, {"integer", in.domain.integer}};
        ji["unit"] = in.unit;
        if (in.rate) ji["rate"] = true;
        if (in.row_count) ji["row_count"] = true;
        j["inputs"].push_back(std::move(ji));
    }
    j["outputs"] = ordered_json::array();
    for (const auto& out : s.outputs) {
        ordered_json jo;
        jo["name"] = out.name;
        jo["label"] = out.label;
        jo["patterns"] = out.patterns;
        jo["oracle"] = out.oracle_text;
        if (out.per_row) jo["per_row"] = true;
        if (!out.aggregate_of.empty()) jo["aggregate_of"] = out.aggregate_of;
        j["outputs"].push_back(std::move(jo));
    }
    return j.dump(2);
}

ProblemSpec load_spec_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SpecError("cannot open spec file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return spec_from_json(ss.str());
}

}  // namespace erfr
