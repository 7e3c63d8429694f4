#include "support.hpp"

#include "erfr/harness.hpp"
#include "erfr/recalc.hpp"

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <json.hpp>

#include <doctest.h>

#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

using namespace erfr;
using namespace erfr::test;
namespace fs = std::filesystem;

namespace {

const ProblemSpec& wall() { return *find_spec("wall_task"); }

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

struct Cli {
    int code = 0;
    std::string out, err;
};

Cli cli(std::vector<std::string> args) {
    args.insert(args.begin(), "erfr");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    Cli c;
    c.code = run_cli(int(argv.size()), argv.data(), out, err);
    c.out = out.str();
    c.err = err.str();
    return c;
}

RunRecord graded(const std::string& replay, const std::string& run_id) {
    ReplayProvider p(testdata("replay/" + replay));
    return grade_run(generate(p, "prompt", run_id, "wall_task"), wall());
}

// Stands in for a model that returns the same workbook for every prompt.
class FixedProvider : public Provider {
public:
    explicit FixedProvider(std::vector<Workbook> books) : books_(std::move(books)) {}
    std::string id() const override { return "fixed"; }
    Generation generate(const std::string&, const std::string& run_id) override {
        int i = std::stoi(run_id.substr(4)) - 1;
        return {"ok", {{"model.xlsx", write_workbook(books_[i % books_.size()]), ""}}};
    }

private:
    std::vector<Workbook> books_;
};

/// httplib server on an ephemeral port, serving one handler.
class LocalServer {
public:
    explicit LocalServer(httplib::Server::Handler h) {
        svr_.Post("/generate", std::move(h));
        port_ = svr_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { svr_.listen_after_bind(); });
        svr_.wait_until_ready();
    }
    ~LocalServer() {
        svr_.stop();
        thread_.join();
    }
    std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/generate"; }

private:
    httplib::Server svr_;
    int port_ = 0;
    std::thread thread_;
};

}  // namespace

// ---- prompts -------------------------------------------------------------------------

TEST_CASE("prompt assembly") {
    const ProblemSpec& area = *find_spec("area_data");
    CHECK(assemble_prompt(area, InstructionSet::defaults()) ==
          area.statement + "\nCreate an Excel model. Use cell formulas. Provide a downloadable Excel file.");
    CHECK(assemble_prompt(area, InstructionSet::none()) == area.statement);
    CHECK(assemble_prompt(area, InstructionSet{{"Only this."}}) == area.statement + "\nOnly this.");
    CHECK(run_id_for(1) == "run-001");
    CHECK(run_id_for(42) == "run-042");
    CHECK(run_id_for(1234) == "run-1234");
}

TEST_CASE("base64") {
    auto bytes = [](std::string_view s) { return std::vector<std::uint8_t>(s.begin(), s.end()); };
    const std::pair<const char*, const char*> vectors[] = {
        {"", ""}, {"f", "Zg=="}, {"fo", "Zm8="}, {"foo", "Zm9v"}, {"foob", "Zm9vYg=="}, {"fooba", "Zm9vYmE="}, {"foobar", "Zm9vYmFy"},
    };
    for (const auto& [plain, coded] : vectors) {
        CHECK(base64_encode(bytes(plain)) == coded);
        CHECK(base64_decode(coded) == bytes(plain));
    }
    CHECK(base64_decode("Zm9v\nYmFy") == bytes("foobar"));
    CHECK_THROWS_AS(base64_decode("Zm9v!"), std::invalid_argument);
    CHECK_THROWS_AS(base64_decode("Zm9"), std::invalid_argument);

    std::mt19937_64 rng(9);
    for (int i = 0; i < 200; ++i) {
        std::vector<std::uint8_t> b(rng() % 70);
        for (auto& x : b) x = std::uint8_t(rng());
        CHECK(base64_decode(base64_encode(b)) == b);
    }
}

// ---- replay and grading -----------------------------------------------------------------

TEST_CASE("replay provider") {
    ReplayProvider p(testdata("replay/wall_task"));
    CHECK(p.run_ids() == std::vector<std::string>{"run-001", "run-002", "run-003", "run-004", "run-005"});
    Generation g = p.generate("ignored", "run-001");
    CHECK(g.transcript.find("model.xlsx") != std::string::npos);
    REQUIRE(g.attachments.size() == 1);
    CHECK(g.attachments[0].name == "model.xlsx");
    CHECK(g.attachments[0].bytes == fixture_bytes("fig4"));
    CHECK_THROWS_AS(p.generate("", "run-999"), ReplayRunMissing);
}

TEST_CASE("generate records digests and load errors") {
    ReplayProvider good(testdata("replay/wall_task"));
    RunRecord r = generate(good, "p", "run-004", "wall_task");
    CHECK(r.provider == good.id());
    CHECK(r.prompt == "p");
    REQUIRE(r.digest);
    CHECK(*r.digest == fingerprint(build_figure_fixture("fig6")).hex());
    CHECK_FALSE(r.load_error);
    CHECK_FALSE(r.report);
    CHECK_FALSE(r.timestamp.empty());

    ReplayProvider none(testdata("replay/no_file"));
    RunRecord n = generate(none, "p", "run-001");
    CHECK_FALSE(n.digest);
    REQUIRE(n.load_error);
    CHECK(n.load_error->code == "NO_FILE_PRODUCED");

    ReplayProvider corrupt(testdata("replay/corrupt"));
    RunRecord c = generate(corrupt, "p", "run-001");
    REQUIRE(c.load_error);
    CHECK(c.load_error->code == "FILE_CORRUPT_NOT_ZIP");
}

TEST_CASE("grading is an ordinary audit of the attachment") {
    RunRecord r = graded("wall_task", "run-001");
    REQUIRE(r.report);
    ErfrReport direct = audit(read_workbook(fixture_bytes("fig4")), wall(), "run-001/model.xlsx");
    CHECK(*r.report == direct);
    for (Verdict v : r.report->criteria) CHECK(v == Verdict::Pass);

    RunRecord six = graded("wall_task", "run-004");
    CHECK(six.report->verdict(Criterion::R5) == Verdict::Fail);

    for (const char* replay : {"no_file", "corrupt"}) {
        RunRecord bad = graded(replay, "run-001");
        REQUIRE(bad.report);
        for (Verdict v : bad.report->criteria) CHECK(v == Verdict::Fail);
        CHECK(bad.report->findings.front().code == bad.load_error->code);
    }
}

// ---- reproducibility --------------------------------------------------------------------

TEST_CASE("reproducibility over the replay set") {
    std::vector<RunRecord> rs;
    for (int i = 1; i <= 5; ++i) rs.push_back(graded("wall_task", run_id_for(i)));
    ReproMetrics m = reproducibility(rs);
    CHECK(m.runs == 5);
    CHECK(m.pairs == 10);
    CHECK(m.identity_rate == doctest::Approx(0.3));
    CHECK(m.verdict_agreement_rate == doctest::Approx(0.3));
    CHECK(m.largest_class == 3);

    std::vector<RunRecord> same(rs.begin(), rs.begin() + 3);
    ReproMetrics s = reproducibility(same);
    CHECK(s.identity_rate == 1.0);
    CHECK(s.verdict_agreement_rate == 1.0);

    CHECK_THROWS_AS(reproducibility({rs[0]}), TooFewRuns);
    CHECK_THROWS_AS(reproducibility({}), TooFewRuns);
    RunRecord other = rs[1];
    other.spec_id = "area_data";
    CHECK_THROWS_AS(reproducibility({rs[0], other}), std::invalid_argument);

    auto j = nlohmann::json::parse(repro_json(m));
    CHECK(j["largest_class"] == 3);
    CHECK(j["identity_rate"].get<double>() == doctest::Approx(0.3));
}

TEST_CASE("different workbooks with the same verdicts") {
    Workbook relabeled = build_figure_fixture("fig4");
    relabeled.set_text(addr("A1"), "Assumptions");
    FixedProvider p({build_figure_fixture("fig4"), relabeled});
    HarnessOptions opt;
    opt.spec = &wall();
    opt.runs = 4;
    auto rs = run_harness(p, opt);
    ReproMetrics m = reproducibility(rs);
    CHECK(m.identity_rate == doctest::Approx(2.0 / 6));
    CHECK(m.verdict_agreement_rate == 1.0);
    CHECK(m.largest_class == 2);

    // Two runs that never produced a file agree with each other.
    RunRecord a = graded("no_file", "run-001");
    RunRecord b = a;
    b.run_id = "run-002";
    CHECK(reproducibility({a, b}).identity_rate == 1.0);
    CHECK(reproducibility({a, graded("wall_task", "run-001")}).identity_rate == 0.0);
}

// ---- records ---------------------------------------------------------------------------

TEST_CASE("record store") {
    TempDir dir("store");
    RecordStore store(dir.path());
    RunRecord r = graded("wall_task", "run-001");
    store.append(r);
    REQUIRE(r.attachments.size() == 1);
    // Attachment paths are relative to the run directory.
    CHECK(fs::exists(dir.path() / "run-001" / r.attachments[0].path));
    CHECK(fs::path(r.attachments[0].path).filename().string().ends_with("-model.xlsx"));
    CHECK(fs::exists(dir.path() / "run-001" / "record.json"));
    CHECK(fs::exists(dir.path() / "run-001" / "timestamp.json"));

    RunRecord again = graded("wall_task", "run-001");
    CHECK_THROWS_AS(store.append(again), RecordExists);

    RunRecord missing = graded("no_file", "run-001");
    missing.run_id = "run-002";
    store.append(missing);

    auto all = store.load_all();
    REQUIRE(all.size() == 2);
    CHECK(all[0].run_id == "run-001");
    CHECK(all[0].digest == r.digest);
    CHECK(all[0].report == r.report);
    CHECK(all[0].timestamp == r.timestamp);
    CHECK(all[0].attachments[0].bytes == fixture_bytes("fig4"));
    CHECK(all[1].load_error == missing.load_error);
    CHECK(record_json(all[0]) == record_json(r));

    // record.json holds attachment paths, not bytes; load_all reads those back.
    RunRecord back = record_from_json(record_json(r));
    CHECK(back.attachments[0].bytes.empty());
    back.attachments[0].bytes = r.attachments[0].bytes;
    CHECK(record_json(back) == record_json(r));
    // The timestamp lives in the sidecar so identical runs have identical records.
    RunRecord later = r;
    later.timestamp = "2000-01-01T00:00:00Z";
    CHECK(record_json(later) == record_json(r));
}

TEST_CASE("replayed harness runs are byte-for-byte repeatable") {
    ReplayProvider p(testdata("replay/wall_task"));
    TempDir a("a"), b("b");
    HarnessOptions opt;
    opt.spec = &wall();
    opt.runs = 5;
    opt.out = a.path();
    auto ra = run_harness(p, opt);
    opt.out = b.path();
    opt.jobs = 4;
    auto rb = run_harness(p, opt);
    REQUIRE(ra.size() == rb.size());
    for (std::size_t i = 0; i < ra.size(); ++i) {
        CHECK(ra[i].run_id == run_id_for(int(i) + 1));
        CHECK(rb[i].run_id == ra[i].run_id);
        CHECK(record_json(ra[i]) == record_json(rb[i]));
        auto rel = fs::path(ra[i].run_id) / "record.json";
        CHECK(slurp(a.path() / rel) == slurp(b.path() / rel));
    }

    opt.jobs = 1;
    opt.out = a.path();
    CHECK_THROWS_AS(run_harness(p, opt), RecordExists);

    opt.out.reset();
    opt.runs = 6;
    CHECK_THROWS_AS(run_harness(p, opt), ReplayRunMissing);
}

// ---- HTTP provider ---------------------------------------------------------------------

TEST_CASE("http provider") {
    std::string seen_auth, seen_prompt, seen_run;
    LocalServer ok([&](const httplib::Request& req, httplib::Response& res) {
        seen_auth = req.get_header_value("Authorization");
        auto body = nlohmann::json::parse(req.body);
        seen_prompt = body["prompt"];
        seen_run = body["run_id"];
        nlohmann::json reply = {{"transcript", "here you go"},
                                {"attachments", {{{"name", "m.xlsx"}, {"bytes_base64", base64_encode(fixture_bytes("fig4"))}}}}};
        res.set_content(reply.dump(), "application/json");
    });
    HttpProvider p(ok.url(), "sekret");
    Generation g = p.generate("build it", "run-007");
    CHECK(seen_auth == "Bearer sekret");
    CHECK(seen_prompt == "build it");
    CHECK(seen_run == "run-007");
    CHECK(g.transcript == "here you go");
    REQUIRE(g.attachments.size() == 1);
    CHECK(g.attachments[0].bytes == fixture_bytes("fig4"));

    RunRecord r = grade_run(generate(p, "x", "run-001", "wall_task"), wall());
    CHECK(r.digest == fingerprint(build_figure_fixture("fig4")).hex());

    LocalServer down([](const httplib::Request&, httplib::Response& res) {
        res.status = 500;
        res.set_content("boom", "text/plain");
    });
    HttpProvider p500(down.url(), "k");
    try {
        p500.generate("x", "run-001");
        FAIL("expected ProviderHttpError");
    } catch (const ProviderHttpError& e) {
        CHECK(e.status() == 500);
    }

    LocalServer junk([](const httplib::Request&, httplib::Response& res) { res.set_content("not json", "text/plain"); });
    CHECK_THROWS_AS(HttpProvider(junk.url(), "k").generate("x", "run-001"), ProviderError);

    LocalServer slow([](const httplib::Request&, httplib::Response& res) {
        std::this_thread::sleep_for(std::chrono::milliseconds(2500));
        res.set_content("{}", "application/json");
    });
    HttpProvider impatient(slow.url(), "k", std::chrono::seconds(1));
    CHECK_THROWS_AS(impatient.generate("x", "run-001"), ProviderTimeout);
}

// ---- command line ----------------------------------------------------------------------

TEST_CASE("cli audit") {
    auto fig4 = testdata("fixtures/fig4.xlsx").string();
    Cli pass = cli({"audit", fig4, "--spec", "wall_task"});
    CHECK(pass.code == 0);
    auto j = nlohmann::json::parse(pass.out);
    CHECK(j["mode"] == "spec");

    Cli fail = cli({"audit", testdata("fixtures/fig6.xlsx").string(), "--spec", "wall_task", "--report", "text"});
    CHECK(fail.code == 1);
    CHECK(fail.out.find("WRONG_VALUE") != std::string::npos);

    Cli structural = cli({"audit", fig4});
    CHECK(structural.code == 0);
    CHECK(nlohmann::json::parse(structural.out)["mode"] == "structural");

    Cli corrupt = cli({"audit", testdata("replay/corrupt/runs/run-001/model.xlsx").string(), "--spec", "wall_task"});
    CHECK(corrupt.code == 1);
    CHECK(corrupt.out.find("FILE_CORRUPT_NOT_ZIP") != std::string::npos);

    // A duplicated input only warns, unless --strict.
    Workbook dup = build_figure_fixture("fig4");
    dup.set_text(addr("F2"), "Wall Length (ft)");
    dup.set_number(addr("G2"), 20);
    dup.set_text(addr("H1"), "Length Check");
    dup.set_formula(addr("H2"), "=G2*1");
    TempDir dir("warn");
    auto path = (dir.path() / "dup.xlsx").string();
    write_file(path, write_workbook(dup));
    CHECK(cli({"audit", path, "--spec", "wall_task"}).code == 0);
    CHECK(cli({"audit", path, "--spec", "wall_task", "--strict"}).code == 1);

    CHECK(cli({"audit", "/nonexistent.xlsx"}).code == 2);
    CHECK(cli({"audit", fig4, "--spec", "no_such_spec"}).code == 2);
    CHECK(cli({"audit", fig4, "--report", "xml"}).code == 2);
    CHECK(cli({"--bogus"}).code == 2);
    CHECK(cli({"--help"}).code == 0);
}

TEST_CASE("cli corpus") {
    Cli list = cli({"corpus", "list"});
    CHECK(list.code == 0);
    CHECK(list.out.find("snapplees_params") != std::string::npos);

    Cli table = cli({"corpus", "audit-fixtures"});
    CHECK(table.code == 1);
    CHECK(table.out.find("fig4") != std::string::npos);

    Cli show = cli({"corpus", "show", "area_data"});
    CHECK(show.code == 0);
    CHECK(spec_from_json(show.out).id == "area_data");

    TempDir dir("fixtures");
    CHECK(cli({"corpus", "write-fixtures", dir.path().string()}).code == 0);
    for (const auto& id : fixture_ids()) CHECK(read_file((dir.path() / (id + ".xlsx")).string()) == fixture_bytes(id));
}

TEST_CASE("cli harness") {
    TempDir out("cli");
    auto rec = (out.path() / "recs").string();
    Cli run = cli({"harness", "run", "--spec", "wall_task", "--provider", "replay:" + testdata("replay/wall_task").string(),
                   "--runs", "5", "--jobs", "2", "--out", rec});
    CHECK(run.code == 1);  // run-004 and run-005 fail
    CHECK(run.out.find("run-005") != std::string::npos);
    CHECK(run.out.find("\"identity_rate\": 0.3") != std::string::npos);

    Cli repro = cli({"harness", "repro", rec});
    CHECK(repro.code == 0);
    CHECK(nlohmann::json::parse(repro.out)["largest_class"] == 3);

    Cli good = cli({"harness", "run", "--spec", "wall_task", "--provider",
                    "replay:" + testdata("replay/wall_task").string(), "--runs", "3", "--no-instructions"});
    CHECK(good.code == 0);

    Cli missing = cli({"harness", "run", "--spec", "wall_task", "--provider", "replay:/nowhere", "--runs", "1"});
    CHECK(missing.code == 2);
    CHECK(cli({"harness", "repro", (out.path() / "empty").string()}).code == 2);
}
