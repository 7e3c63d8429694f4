#include "erfr/harness.hpp"

#include <json.hpp>
#include <map>

namespace erfr {

ReproMetrics reproducibility(const std::vector<RunRecord>& records) {
    const int n = static_cast<int>(records.size());
    if (n < 2) throw TooFewRuns(n);
    for (const auto& r : records)
        if (r.spec_id != records.front().spec_id)
            throw std::invalid_argument("runs mix specs '" + records.front().spec_id + "' and '" + r.spec_id + "'");

    auto key = [](const RunRecord& r) {
        if (r.digest) return *r.digest;
        return "!" + (r.load_error ? r.load_error->code : std::string("UNGRADED"));
    };
    ReproMetrics m;
    m.runs = n;
    m.pairs = n * (n - 1) / 2;
    int same_digest = 0, same_verdicts = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            if (key(records[i]) == key(records[j])) ++same_digest;
            const auto& a = records[i].report;
            const auto& b = records[j].report;
            if (a && b && a->criteria == b->criteria) ++same_verdicts;
        }
    m.identity_rate = double(same_digest) / m.pairs;
    m.verdict_agreement_rate = double(same_verdicts) / m.pairs;
    std::map<std::string, int> classes;
    for (const auto& r : records) m.largest_class = std::max(m.largest_class, ++classes[key(r)]);
    return m;
}

std::string repro_json(const ReproMetrics& m) {
    nlohmann::ordered_json j;
    j["runs"] = m.runs;
    j["pairs"] = m.pairs;
    j["identity_rate"] = m.identity_rate;
    j["verdict_agreement_rate"] = m.verdict_agreement_rate;
    j["largest_class"] = m.largest_class;
    return j.dump(2);
}

}  // namespace erfr
