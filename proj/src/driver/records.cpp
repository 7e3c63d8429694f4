#include "erfr/harness.hpp"
#include "erfr/recalc.hpp"
#include "erfr/workbook.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <ctime>
#include <fstream>
#include <json.hpp>
#include <sstream>

namespace erfr {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

std::string utc_now() {
    std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string content_hash(const std::vector<std::uint8_t>& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (auto b : bytes) {
        h ^= b;
        h *= 0x100000001b3ull;
    }
    return fmt::format("{:016x}", h);
}

bool is_xlsx_name(const std::string& name) {
    return name.size() >= 5 && name.compare(name.size() - 5, 5, ".xlsx") == 0;
}

// The attachment that gets graded: the first .xlsx by name, else the first.
const Attachment* graded_attachment(const RunRecord& r) {
    const Attachment* best = nullptr;
    for (const auto& a : r.attachments) {
        if (!is_xlsx_name(a.name)) continue;
        if (!best || a.name < best->name) best = &a;
    }
    if (!best && !r.attachments.empty()) best = &r.attachments.front();
    return best;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + p.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << text;
}

}  // namespace

RunRecord generate(Provider& provider, const std::string& prompt, const std::string& run_id,
                   const std::string& spec_id) {
    RunRecord r;
    r.run_id = run_id;
    r.spec_id = spec_id;
    r.prompt = prompt;
    r.provider = provider.id();
    r.timestamp = utc_now();
    Generation g = provider.generate(prompt, run_id);
    r.transcript = std::move(g.transcript);
    r.attachments = std::move(g.attachments);

    const Attachment* a = graded_attachment(r);
    if (!a) {
        r.load_error = LoadError{std::string(codes::kNoFileProduced), "the run produced no downloadable file"};
        return r;
    }
    try {
        r.digest = fingerprint(read_workbook(a->bytes)).hex();
    } catch (const XlsxError& e) {
        r.load_error = LoadError{e.finding_code(), fmt::format("{}: {}", a->name, e.what())};
    }
    return r;
}

RunRecord grade_run(RunRecord record, const ProblemSpec& spec) {
    const Attachment* a = graded_attachment(record);
    std::string artifact = record.run_id + (a ? "/" + a->name : "");
    if (record.load_error) {
        record.report = failed_load_report(artifact, AuditMode::Spec, record.load_error->code, record.load_error->message);
        return record;
    }
    record.report = audit(read_workbook(a->bytes), spec, artifact);
    return record;
}

std::string record_json(const RunRecord& r) {
    ordered_json j;
    j["run_id"] = r.run_id;
    j["spec_id"] = r.spec_id;
    j["provider"] = r.provider;
    j["prompt"] = r.prompt;
    j["transcript"] = r.transcript;
    auto& atts = j["attachments"] = ordered_json::array();
    for (const auto& a : r.attachments)
        atts.push_back({{"name", a.name}, {"path", a.path}, {"size", a.bytes.size()}});
    j["digest"] = r.digest ? ordered_json(*r.digest) : ordered_json(nullptr);
    j["load_error"] = r.load_error ? ordered_json{{"code", r.load_error->code}, {"message", r.load_error->message}}
                                   : ordered_json(nullptr);
    j["report"] = r.report ? ordered_json::parse(report_json(*r.report)) : ordered_json(nullptr);
    return j.dump(2) + "\n";
}

RunRecord record_from_json(std::string_view text) {
    auto j = ordered_json::parse(text);
    RunRecord r;
    r.run_id = j.at("run_id").get<std::string>();
    r.spec_id = j.at("spec_id").get<std::string>();
    r.provider = j.at("provider").get<std::string>();
    r.prompt = j.at("prompt").get<std::string>();
    r.transcript = j.at("transcript").get<std::string>();
    for (const auto& a : j.at("attachments"))
        r.attachments.push_back({a.at("name").get<std::string>(), {}, a.at("path").get<std::string>()});
    if (!j.at("digest").is_null()) r.digest = j["digest"].get<std::string>();
    if (!j.at("load_error").is_null())
        r.load_error = LoadError{j["load_error"].at("code").get<std::string>(),
                                 j["load_error"].at("message").get<std::string>()};
    if (!j.at("report").is_null()) r.report = report_from_json(j["report"].dump());
    return r;
}

void RecordStore::append(RunRecord& r) {
    std::lock_guard lock(mu_);
    fs::path run = dir_ / r.run_id;
    if (fs::exists(run)) throw RecordExists("run " + r.run_id + " is already recorded in " + dir_.string());
    fs::create_directories(run / "attachments");
    for (auto& a : r.attachments) {
        // Only the final path component of a provider-chosen name is kept.
        std::string base = fs::path(a.name).filename().string();
        a.path = "attachments/" + content_hash(a.bytes) + "-" + base;
        write_file((run / a.path).string(), a.bytes);
    }
    spit(run / "record.json", record_json(r));
    spit(run / "timestamp.json", ordered_json{{"timestamp", r.timestamp}}.dump() + "\n");
}

std::vector<RunRecord> RecordStore::load_all() const {
    std::vector<fs::path> runs;
    for (const auto& e : fs::directory_iterator(dir_))
        if (e.is_directory() && fs::exists(e.path() / "record.json")) runs.push_back(e.path());
    std::sort(runs.begin(), runs.end());
    std::vector<RunRecord> out;
    for (const auto& run : runs) {
        RunRecord r = record_from_json(slurp(run / "record.json"));
        for (auto& a : r.attachments) a.bytes = read_file((run / a.path).string());
        if (fs::exists(run / "timestamp.json"))
            r.timestamp = ordered_json::parse(slurp(run / "timestamp.json")).value("timestamp", "");
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace erfr
