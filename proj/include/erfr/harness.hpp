#pragma once

#include "erfr/audit.hpp"
#include "erfr/spec.hpp"

#include <array>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace erfr {

// ---- prompts ---------------------------------------------------------------

struct InstructionSet {
    std::vector<std::string> sentences;

    /// "Create an Excel model." / "Use cell formulas." / "Provide a downloadable Excel file."
    static InstructionSet defaults();
    /// No instructions at all; the prompt is the bare statement.
    static InstructionSet none() { return {}; }
};

/// Statement, a newline, then the sentences joined by single spaces. With no
/// sentences the prompt is the statement alone.
std::string assemble_prompt(const ProblemSpec& spec, const InstructionSet& instructions);

// ---- providers -------------------------------------------------------------

struct Attachment {
    std::string name;
    std::vector<std::uint8_t> bytes;
    std::string path;  // where the record store keeps it; empty until stored
};

struct Generation {
    std::string transcript;
    std::vector<Attachment> attachments;
};

class ProviderError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};
class ProviderTimeout : public ProviderError {
public:
    explicit ProviderTimeout(const std::string& what) : ProviderError(what) {}
};
class ProviderHttpError : public ProviderError {
public:
    ProviderHttpError(int status, const std::string& what) : ProviderError(what), status_(status) {}
    int status() const { return status_; }

private:
    int status_;
};
class ReplayRunMissing : public ProviderError {
public:
    explicit ReplayRunMissing(const std::string& what) : ProviderError(what) {}
};

class Provider {
public:
    virtual ~Provider() = default;
    virtual std::string id() const = 0;
    virtual Generation generate(const std::string& prompt, const std::string& run_id) = 0;
};

/// Reads `<dir>/runs/<run_id>/transcript.txt` and every `*.xlsx` beside it,
/// in name order. The prompt is ignored.
class ReplayProvider : public Provider {
public:
    explicit ReplayProvider(std::filesystem::path dir) : dir_(std::move(dir)) {}
    std::string id() const override;
    Generation generate(const std::string& prompt, const std::string& run_id) override;
    /// Run ids present under `<dir>/runs`, sorted.
    std::vector<std::string> run_ids() const;

private:
    std::filesystem::path dir_;
};

/// POSTs {"prompt","run_id"} to `url` and expects
/// {"transcript", "attachments":[{"name","bytes_base64"}]} back.
class HttpProvider : public Provider {
public:
    HttpProvider(std::string url, std::string api_key, std::chrono::seconds timeout = std::chrono::seconds(120));
    /// Endpoint from ERFR_PROVIDER_URL, key from ERFR_PROVIDER_KEY.
    static std::unique_ptr<HttpProvider> from_environment();
    std::string id() const override;
    Generation generate(const std::string& prompt, const std::string& run_id) override;

private:
    std::string url_;
    std::string key_;
    std::chrono::seconds timeout_;
};

std::string base64_encode(const std::vector<std::uint8_t>& bytes);
/// Throws std::invalid_argument on malformed input.
std::vector<std::uint8_t> base64_decode(std::string_view text);

// ---- run records -----------------------------------------------------------

struct LoadError {
    std::string code;  // FILE_CORRUPT_* or NO_FILE_PRODUCED
    std::string message;
    friend bool operator==(const LoadError&, const LoadError&) = default;
};

struct RunRecord {
    std::string run_id;
    std::string spec_id;
    std::string prompt;
    std::string provider;
    std::string timestamp;  // kept in a sidecar, outside record.json
    std::string transcript;
    std::vector<Attachment> attachments;
    std::optional<std::string> digest;  // workbook fingerprint, iff the graded attachment loaded
    std::optional<LoadError> load_error;
    std::optional<ErfrReport> report;
};

/// Runs the provider and parses the first attachment (by name). Not graded.
RunRecord generate(Provider& provider, const std::string& prompt, const std::string& run_id,
                   const std::string& spec_id = "");

/// Attaches audit(workbook, spec); a load failure becomes an all-Fail report.
RunRecord grade_run(RunRecord record, const ProblemSpec& spec);

class RecordExists : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One directory per run id: record.json, timestamp.json and
/// attachments/<digest>-<name>. Existing runs are never overwritten.
class RecordStore {
public:
    explicit RecordStore(std::filesystem::path dir) : dir_(std::move(dir)) {}
    /// Writes the record and fills in attachment paths. Throws RecordExists.
    void append(RunRecord& record);
    std::vector<RunRecord> load_all() const;
    const std::filesystem::path& dir() const { return dir_; }

private:
    std::filesystem::path dir_;
    std::mutex mu_;
};

/// The record.json document (no timestamp).
std::string record_json(const RunRecord& record);
RunRecord record_from_json(std::string_view text);

// ---- reproducibility -------------------------------------------------------

struct ReproMetrics {
    int runs = 0;
    int pairs = 0;
    double identity_rate = 0;           // pairs with equal workbook digests
    double verdict_agreement_rate = 0;  // pairs with equal R1..R5 vectors
    int largest_class = 0;              // largest set of runs with one digest
};

class TooFewRuns : public std::invalid_argument {
public:
    explicit TooFewRuns(int n) : std::invalid_argument("reproducibility needs at least 2 runs, got " + std::to_string(n)) {}
};

/// Runs without a workbook are keyed by their load-error code.
ReproMetrics reproducibility(const std::vector<RunRecord>& records);
std::string repro_json(const ReproMetrics& m);

// ---- harness / CLI ---------------------------------------------------------

struct HarnessOptions {
    const ProblemSpec* spec = nullptr;
    InstructionSet instructions = InstructionSet::defaults();
    int runs = 1;
    int jobs = 1;
    std::optional<std::filesystem::path> out;
};

/// Run ids "run-001", "run-002", ...
std::string run_id_for(int index);

/// Generates and grades `runs` runs; results are in run order whatever `jobs` is.
std::vector<RunRecord> run_harness(Provider& provider, const HarnessOptions& options);

/// The `erfr` command line. Returns the process exit code: 0 when every
/// criterion is Pass or Warn, 1 on any Fail, 2 on tool or provider errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace erfr
