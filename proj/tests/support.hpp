#pragma once
// Shared helpers for the test binaries.

#include "erfr/corpus.hpp"
#include "erfr/workbook.hpp"

#include <cmath>
#include <filesystem>
#include <random>
#include <string>

namespace erfr::test {

inline std::filesystem::path testdata(const std::string& rel = "") { return std::filesystem::path(ERFR_TESTDATA_DIR) / rel; }

inline std::vector<std::uint8_t> fixture_bytes(const std::string& id) {
    return read_file(testdata("fixtures/" + id + ".xlsx").string());
}

inline bool rel_close(double got, double want, double tol = 1e-12) {
    return std::abs(got - want) <= tol * std::max(1.0, std::abs(want));
}

/// A fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("erfr-" + tag + "-" + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

/// Uniform in-domain value; integers are whole numbers in [min, max].
inline double sample(const Domain& d, std::mt19937_64& rng) {
    if (d.integer) return double(std::uniform_int_distribution<long>(long(std::ceil(d.min)), long(std::floor(d.max)))(rng));
    if (d.min == d.max) return d.min;
    return std::uniform_real_distribution<double>(d.min, d.max)(rng);
}

}  // namespace erfr::test
