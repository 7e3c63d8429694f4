#pragma once

#include "erfr/spec.hpp"
#include "erfr/workbook.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace erfr {

struct CorpusEntry {
    ProblemSpec spec;
    std::vector<std::string> tags;      // data, parameters, month, made-up-noun
    std::vector<std::string> fixtures;  // figure fixtures graded against this spec
};

/// The nine built-in problems: eight spending/area statements and the wall task.
const std::vector<CorpusEntry>& corpus();
std::vector<ProblemSpec> builtin_specs();
const ProblemSpec* find_spec(std::string_view id);

/// A model in the two-block layout: labelled inputs in A:B, labelled output
/// formulas in C:D, formulas compiled from the oracles.
Workbook build_reference_workbook(const ProblemSpec& spec);

class UnknownFixtureId : public std::invalid_argument {
public:
    explicit UnknownFixtureId(const std::string& id) : std::invalid_argument("unknown fixture '" + id + "'") {}
};

const std::vector<std::string>& fixture_ids();
Workbook build_figure_fixture(std::string_view id);
/// The spec a fixture is graded against.
std::string fixture_spec_id(std::string_view id);

/// JSON form of ProblemSpec; throws SpecError on malformed documents.
ProblemSpec spec_from_json(std::string_view text);
std::string spec_to_json(const ProblemSpec& spec);
ProblemSpec load_spec_file(const std::string& path);

}  // namespace erfr
