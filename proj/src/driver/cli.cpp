#include "erfr/corpus.hpp"
#include "erfr/harness.hpp"
#include "erfr/workbook.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <atomic>
#include <exception>
#include <ostream>
#include <thread>

namespace erfr {

namespace fs = std::filesystem;

std::vector<RunRecord> run_harness(Provider& provider, const HarnessOptions& options) {
    if (!options.spec) throw std::invalid_argument("harness needs a spec");
    const std::string prompt = assemble_prompt(*options.spec, options.instructions);
    std::optional<RecordStore> store;
    if (options.out) {
        fs::create_directories(*options.out);
        store.emplace(*options.out);
    }

    std::vector<RunRecord> records(static_cast<std::size_t>(std::max(options.runs, 0)));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;
    auto worker = [&] {
        for (std::size_t i; (i = next++) < records.size();) {
            try {
                RunRecord r = generate(provider, prompt, run_id_for(static_cast<int>(i) + 1), options.spec->id);
                r = grade_run(std::move(r), *options.spec);
                if (store) store->append(r);
                records[i] = std::move(r);
            } catch (...) {
                std::lock_guard lock(failure_mu);
                if (!failure) failure = std::current_exception();
                next = records.size();
            }
        }
    };
    int jobs = std::clamp(options.jobs, 1, std::max(1, options.runs));
    std::vector<std::thread> pool;
    for (int t = 1; t < jobs; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    return records;
}

namespace {

std::string verdict_row(const ErfrReport& r) {
    std::string s;
    for (int c = 0; c < 5; ++c) s += fmt::format("  {:<12}", to_string(r.criteria[c]));
    return s;
}

struct ToolError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

ProblemSpec resolve_spec(const std::string& arg) {
    if (const ProblemSpec* s = find_spec(arg)) return *s;
    if (fs::is_regular_file(arg)) return load_spec_file(arg);
    throw ToolError("unknown spec '" + arg + "' (not a built-in id or a readable file)");
}

int cmd_audit(const std::string& file, const std::string& spec_arg, const std::string& format, bool strict,
              std::ostream& out) {
    if (!fs::is_regular_file(file)) throw ToolError("no such file: " + file);
    std::optional<ProblemSpec> spec;
    if (!spec_arg.empty()) spec = resolve_spec(spec_arg);
    const ProblemSpec* sp = spec ? &*spec : nullptr;

    ErfrReport report;
    auto bytes = read_file(file);
    try {
        report = audit(read_workbook(bytes), sp, file);
    } catch (const XlsxError& e) {
        report = failed_load_report(file, sp ? AuditMode::Spec : AuditMode::Structural, e.finding_code(), e.what());
    }
    out << (format == "text" ? report_text(report) : report_json(report) + "\n");
    return report.failed(strict) ? 1 : 0;
}

int cmd_corpus_list(std::ostream& out) {
    for (const auto& e : corpus()) {
        std::string tags, fixtures;
        for (const auto& t : e.tags) tags += (tags.empty() ? "" : ",") + t;
        for (const auto& f : e.fixtures) fixtures += (fixtures.empty() ? "" : ",") + f;
        out << fmt::format("{:<22}{:<26}{}\n", e.spec.id, tags, fixtures);
    }
    return 0;
}

int cmd_audit_fixtures(bool strict, std::ostream& out) {
    out << fmt::format("{:<13}{:<21}", "fixture", "spec");
    for (int c = 0; c < 5; ++c) out << fmt::format("  {:<12}", to_string(Criterion(c)));
    out << "fail-findings\n";
    bool any_failed = false;
    for (const auto& id : fixture_ids()) {
        std::string spec_id = fixture_spec_id(id);
        ErfrReport r = audit(build_figure_fixture(id), find_spec(spec_id), id);
        auto fails = std::count_if(r.findings.begin(), r.findings.end(),
                                   [](const Finding& f) { return f.severity == Severity::Fail; });
        out << fmt::format("{:<13}{:<21}{}{}\n", id, spec_id, verdict_row(r), fails);
        any_failed = any_failed || r.failed(strict);
    }
    return any_failed ? 1 : 0;
}

int cmd_write_fixtures(const std::string& dir, std::ostream& out) {
    fs::create_directories(dir);
    for (const auto& id : fixture_ids()) {
        auto path = (fs::path(dir) / (id + ".xlsx")).string();
        write_file(path, write_workbook(build_figure_fixture(id)));
        out << path << "\n";
    }
    return 0;
}

std::unique_ptr<Provider> make_provider(const std::string& arg) {
    if (arg.rfind("replay:", 0) == 0) {
        fs::path dir = arg.substr(7);
        if (!fs::is_directory(dir / "runs")) throw ToolError("replay directory has no runs/: " + dir.string());
        return std::make_unique<ReplayProvider>(dir);
    }
    if (arg == "http") return HttpProvider::from_environment();
    throw ToolError("unknown provider '" + arg + "' (expected replay:<dir> or http)");
}

int cmd_harness_run(const std::string& spec_arg, const std::string& provider_arg, int runs, int jobs,
                    const std::string& out_dir, bool no_instructions, bool strict, std::ostream& out) {
    ProblemSpec spec = resolve_spec(spec_arg);
    auto provider = make_provider(provider_arg);
    HarnessOptions opts;
    opts.spec = &spec;
    opts.runs = runs;
    opts.jobs = jobs;
    if (no_instructions) opts.instructions = InstructionSet::none();
    if (!out_dir.empty()) opts.out = out_dir;

    auto records = run_harness(*provider, opts);
    bool any_failed = false;
    for (const auto& r : records) {
        std::string state = r.digest ? *r.digest : r.load_error->code;
        out << fmt::format("{:<10}{:<28}{}\n", r.run_id, state, verdict_row(*r.report));
        any_failed = any_failed || r.report->failed(strict);
    }
    if (records.size() >= 2) out << repro_json(reproducibility(records)) << "\n";
    return any_failed ? 1 : 0;
}

int cmd_harness_repro(const std::string& dir, std::ostream& out) {
    if (!fs::is_directory(dir)) throw ToolError("no such records directory: " + dir);
    RecordStore store{fs::path(dir)};
    out << repro_json(reproducibility(store.load_all())) << "\n";
    return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Audit spreadsheet models for reusability and grade generated workbooks.", "erfr"};
    app.require_subcommand(1);

    auto* audit_cmd = app.add_subcommand("audit", "Audit one .xlsx file");
    std::string file, spec_arg, format = "json";
    bool strict = false;
    audit_cmd->add_option("file", file, "Workbook to audit")->required();
    audit_cmd->add_option("--spec", spec_arg, "Built-in spec id or spec JSON file; omit for a structural audit");
    audit_cmd->add_option("--report", format, "Report format")->check(CLI::IsMember({"json", "text"}));
    audit_cmd->add_flag("--strict", strict, "Treat warnings as failures");

    auto* corpus_cmd = app.add_subcommand("corpus", "Built-in specs and figure fixtures");
    corpus_cmd->require_subcommand(1);
    auto* list_cmd = corpus_cmd->add_subcommand("list", "List built-in specs");
    auto* fixtures_cmd = corpus_cmd->add_subcommand("audit-fixtures", "Audit every figure fixture");
    fixtures_cmd->add_flag("--strict", strict, "Treat warnings as failures");
    auto* write_cmd = corpus_cmd->add_subcommand("write-fixtures", "Write the figure fixtures as .xlsx files");
    std::string dir;
    write_cmd->add_option("dir", dir, "Output directory")->required();
    auto* show_cmd = corpus_cmd->add_subcommand("show", "Print a built-in spec as JSON");
    std::string show_id;
    show_cmd->add_option("id", show_id, "Spec id")->required();

    auto* harness_cmd = app.add_subcommand("harness", "Generate, grade and compare runs");
    harness_cmd->require_subcommand(1);
    auto* run_cmd = harness_cmd->add_subcommand("run", "Generate and grade runs for one spec");
    std::string provider_arg, out_dir;
    int runs = 1, jobs = 1;
    bool no_instructions = false;
    run_cmd->add_option("--spec", spec_arg, "Built-in spec id or spec JSON file")->required();
    run_cmd->add_option("--provider", provider_arg, "replay:<dir> or http")->required();
    run_cmd->add_option("--runs", runs, "Number of runs")->check(CLI::PositiveNumber);
    run_cmd->add_option("--jobs", jobs, "Runs in flight at once")->check(CLI::PositiveNumber);
    run_cmd->add_option("--out", out_dir, "Record directory");
    run_cmd->add_flag("--no-instructions", no_instructions, "Send the bare problem statement");
    run_cmd->add_flag("--strict", strict, "Treat warnings as failures");
    auto* repro_cmd = harness_cmd->add_subcommand("repro", "Reproducibility metrics over recorded runs");
    repro_cmd->add_option("records", dir, "Record directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return 2;
    }

    try {
        if (*audit_cmd) return cmd_audit(file, spec_arg, format, strict, out);
        if (*list_cmd) return cmd_corpus_list(out);
        if (*fixtures_cmd) return cmd_audit_fixtures(strict, out);
        if (*write_cmd) return cmd_write_fixtures(dir, out);
        if (*show_cmd) {
            const ProblemSpec* s = find_spec(show_id);
            if (!s) throw ToolError("unknown spec '" + show_id + "'");
            out << spec_to_json(*s) << "\n";
            return 0;
        }
        if (*run_cmd) return cmd_harness_run(spec_arg, provider_arg, runs, jobs, out_dir, no_instructions, strict, out);
        if (*repro_cmd) return cmd_harness_repro(dir, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}

}  // namespace erfr
