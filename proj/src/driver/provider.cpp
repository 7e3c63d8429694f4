#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "erfr/harness.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <sstream>

namespace erfr {

namespace fs = std::filesystem;

std::string base64_encode(const std::vector<std::uint8_t>& bytes) {
    std::string out(4 * ((bytes.size() + 2) / 3), '\0');
    int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(), static_cast<int>(bytes.size()));
    out.resize(static_cast<std::size_t>(n));
    return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
    std::string clean;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) clean += c;
    if (clean.size() % 4 != 0) throw std::invalid_argument("base64 length is not a multiple of 4");
    std::vector<std::uint8_t> out(clean.size() / 4 * 3);
    int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(clean.data()),
                            static_cast<int>(clean.size()));
    if (n < 0) throw std::invalid_argument("malformed base64");
    // EVP_DecodeBlock keeps the zero bytes that stand in for '=' padding.
    std::size_t pad = 0;
    if (!clean.empty() && clean.back() == '=') ++pad;
    if (clean.size() > 1 && clean[clean.size() - 2] == '=') ++pad;
    out.resize(static_cast<std::size_t>(n) - pad);
    return out;
}

// ---- replay ----------------------------------------------------------------

std::string ReplayProvider::id() const { return "replay:" + dir_.string(); }

std::vector<std::string> ReplayProvider::run_ids() const {
    std::vector<std::string> ids;
    std::error_code ec;
    for (const auto& e : fs::directory_iterator(dir_ / "runs", ec))
        if (e.is_directory()) ids.push_back(e.path().filename().string());
    std::sort(ids.begin(), ids.end());
    return ids;
}

Generation ReplayProvider::generate(const std::string&, const std::string& run_id) {
    fs::path run = dir_ / "runs" / run_id;
    if (!fs::is_directory(run)) throw ReplayRunMissing("no replay run " + run.string());
    Generation g;
    if (fs::exists(run / "transcript.txt")) {
        std::ifstream in(run / "transcript.txt", std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        g.transcript = ss.str();
    }
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(run))
        if (e.is_regular_file() && e.path().extension() == ".xlsx") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) g.attachments.push_back({f.filename().string(), read_file(f.string()), ""});
    return g;
}

// ---- http ------------------------------------------------------------------

HttpProvider::HttpProvider(std::string url, std::string api_key, std::chrono::seconds timeout)
    : url_(std::move(url)), key_(std::move(api_key)), timeout_(timeout) {}

std::unique_ptr<HttpProvider> HttpProvider::from_environment() {
    const char* url = std::getenv("ERFR_PROVIDER_URL");
    if (!url || !*url) throw ProviderError("ERFR_PROVIDER_URL is not set");
    const char* key = std::getenv("ERFR_PROVIDER_KEY");
    return std::make_unique<HttpProvider>(url, key ? key : "");
}

std::string HttpProvider::id() const { return "http:" + url_; }

Generation HttpProvider::generate(const std::string& prompt, const std::string& run_id) {
    // Split "scheme://host[:port]" from the request path.
    auto scheme_end = url_.find("://");
    if (scheme_end == std::string::npos) throw ProviderError("provider URL lacks a scheme: " + url_);
    auto path_start = url_.find('/', scheme_end + 3);
    std::string origin = url_.substr(0, path_start);
    std::string path = path_start == std::string::npos ? "/" : url_.substr(path_start);

    httplib::Client client(origin);
    client.set_connection_timeout(timeout_);
    client.set_read_timeout(timeout_);
    client.set_write_timeout(timeout_);
    httplib::Headers headers;
    if (!key_.empty()) headers.emplace("Authorization", "Bearer " + key_);

    nlohmann::json body = {{"prompt", prompt}, {"run_id", run_id}};
    auto res = client.Post(path, headers, body.dump(), "application/json");
    if (!res) {
        auto err = res.error();
        if (err == httplib::Error::Read || err == httplib::Error::ConnectionTimeout)
            throw ProviderTimeout("provider did not answer within " + std::to_string(timeout_.count()) + " s");
        throw ProviderError("provider request failed: " + httplib::to_string(err));
    }
    if (res->status != 200)
        throw ProviderHttpError(res->status, "provider answered HTTP " + std::to_string(res->status));

    Generation g;
    try {
        auto j = nlohmann::json::parse(res->body);
        g.transcript = j.value("transcript", "");
        for (const auto& a : j.value("attachments", nlohmann::json::array()))
            g.attachments.push_back(
                {a.at("name").get<std::string>(), base64_decode(a.at("bytes_base64").get<std::string>()), ""});
    } catch (const std::exception& e) {
        throw ProviderError(std::string("malformed provider response: ") + e.what());
    }
    return g;
}

}  // namespace erfr
