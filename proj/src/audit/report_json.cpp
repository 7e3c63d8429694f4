#include "erfr/audit.hpp"

#include <fmt/format.h>
#include <json.hpp>
#include <stdexcept>

namespace erfr {
namespace {

std::string cell_name(const CellAddr& a) { return a.sheet == kDefaultSheet ? a.a1() : a.qualified(); }

nlohmann::ordered_json cells_json(const std::vector<CellAddr>& cells) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& a : cells) arr.push_back(cell_name(a));
    return arr;
}

CellAddr parse_cell(const std::string& name) {
    auto bang = name.rfind('!');
    auto a = bang == std::string::npos ? CellAddr::parse(name)
                                       : CellAddr::parse(std::string_view(name).substr(bang + 1), name.substr(0, bang));
    if (!a) throw std::invalid_argument("bad cell '" + name + "' in report");
    return *a;
}

std::vector<CellAddr> parse_cells(const nlohmann::ordered_json& arr) {
    std::vector<CellAddr> out;
    for (const auto& c : arr) out.push_back(parse_cell(c.get<std::string>()));
    return out;
}

// Looks a printed enum name up by walking the enum's values.
template <typename E>
E parse_enum(const std::string& name, int count) {
    for (int i = 0; i < count; ++i)
        if (to_string(E(i)) == name) return E(i);
    throw std::invalid_argument("unknown name '" + name + "' in report");
}

}  // namespace

std::string report_json(const ErfrReport& r, int indent) {
    nlohmann::ordered_json j;
    j["artifact"] = r.artifact;
    j["mode"] = to_string(r.mode);
    auto& criteria = j["criteria"] = nlohmann::ordered_json::object();
    for (int c = 0; c < 5; ++c) criteria[std::string(to_string(Criterion(c)))] = to_string(r.criteria[c]);
    auto& findings = j["findings"] = nlohmann::ordered_json::array();
    for (const auto& f : r.findings) {
        findings.push_back({{"code", f.code},
                            {"severity", to_string(f.severity)},
                            {"criterion", to_string(f.criterion)},
                            {"cells", cells_json(f.cells)},
                            {"message", f.message}});
    }
    auto& bindings = j["bindings"] = nlohmann::ordered_json::array();
    for (const auto& b : r.bindings) {
        bindings.push_back({{"name", b.name},
                            {"role", b.is_input ? "input" : "output"},
                            {"cells", cells_json(b.cells)},
                            {"method", to_string(b.method)},
                            {"encoding", to_string(b.encoding)},
                            {"confirmed", b.confirmed},
                            {"note", b.note}});
    }
    j["metrics"] = {{"perturbation_vectors", r.metrics.perturbation_vectors}, {"tolerance", r.metrics.tolerance}};
    return j.dump(indent);
}

ErfrReport report_from_json(std::string_view text) {
    auto j = nlohmann::ordered_json::parse(text);
    ErfrReport r;
    r.artifact = j.at("artifact").get<std::string>();
    r.mode = parse_enum<AuditMode>(j.at("mode").get<std::string>(), 2);
    for (int c = 0; c < 5; ++c)
        r.criteria[c] = parse_enum<Verdict>(j.at("criteria").at(std::string(to_string(Criterion(c)))), 4);
    for (const auto& jf : j.at("findings")) {
        Finding f;
        f.code = jf.at("code").get<std::string>();
        f.severity = parse_enum<Severity>(jf.at("severity").get<std::string>(), 3);
        f.criterion = parse_enum<Criterion>(jf.at("criterion").get<std::string>(), 5);
        f.cells = parse_cells(jf.at("cells"));
        f.message = jf.at("message").get<std::string>();
        r.findings.push_back(std::move(f));
    }
    for (const auto& jb : j.at("bindings")) {
        Binding b;
        b.name = jb.at("name").get<std::string>();
        b.is_input = jb.at("role").get<std::string>() == "input";
        b.cells = parse_cells(jb.at("cells"));
        b.method = parse_enum<BindMethod>(jb.at("method").get<std::string>(), 6);
        b.encoding = parse_enum<Encoding>(jb.at("encoding").get<std::string>(), 3);
        b.confirmed = jb.at("confirmed").get<bool>();
        b.note = jb.at("note").get<std::string>();
        r.bindings.push_back(std::move(b));
    }
    r.metrics.perturbation_vectors = j.at("metrics").at("perturbation_vectors").get<int>();
    r.metrics.tolerance = j.at("metrics").at("tolerance").get<double>();
    return r;
}

std::string report_text(const ErfrReport& r) {
    std::string out = fmt::format("{} ({} mode)\n", r.artifact.empty() ? "<workbook>" : r.artifact, to_string(r.mode));
    for (int c = 0; c < 5; ++c) out += fmt::format("  {}  {}\n", to_string(Criterion(c)), to_string(r.criteria[c]));
    if (!r.findings.empty()) out += "findings:\n";
    for (const auto& f : r.findings) {
        std::string cells;
        for (std::size_t i = 0; i < f.cells.size() && i < 4; ++i) cells += (i ? "," : "") + cell_name(f.cells[i]);
        if (f.cells.size() > 4) cells += fmt::format(",+{}", f.cells.size() - 4);
        out += fmt::format("  [{} {}] {} {}{}{}\n", to_string(f.criterion), to_string(f.severity), f.code,
                           cells, cells.empty() ? "" : " ", f.message);
    }
    if (!r.bindings.empty()) out += "bindings:\n";
    for (const auto& b : r.bindings) {
        std::string cells;
        if (b.cells.size() == 1) cells = cell_name(b.cells.front());
        else if (!b.cells.empty()) cells = cell_name(b.cells.front()) + ":" + cell_name(b.cells.back());
        out += fmt::format("  {:<6} {:<16} {:<10} {}{}{}\n", b.is_input ? "input" : "output", b.name,
                           cells.empty() ? "-" : cells, to_string(b.method),
                           b.encoding != Encoding::Identity ? fmt::format(" ({})", to_string(b.encoding)) : "",
                           b.note.empty() ? "" : "  " + b.note);
    }
    return out;
}

}  // namespace erfr
