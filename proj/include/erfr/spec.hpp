#pragma once

#include "erfr/formula.hpp"

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace erfr {

struct Domain {
    double min = 0;
    double max = 0;
    bool integer = false;

    bool contains(double v) const;
    double clamp(double v) const;  // rounds first when integer
};

/// How a workbook may store a rate input: 0.2 as 0.2, as 20 (percent) or
/// as 1.2 (a "1 + rate" multiplier).
enum class Encoding { Identity, Percent, OnePlus };
std::string_view to_string(Encoding e);
double encode(Encoding e, double v);
double decode(Encoding e, double stored);

struct InputSpec {
    std::string name;
    std::string label;                  // display label used by the reference builder
    std::vector<std::string> patterns;  // lowercase phrases, any of which names the input
    double default_value = 0;
    Domain domain;
    std::string unit;
    bool rate = false;       // percent and 1+x encodings accepted
    bool row_count = false;  // may be expressed as the number of rows of a daily table
};

struct OutputSpec {
    std::string name;
    std::string label;
    std::vector<std::string> patterns;
    std::string oracle_text;
    ExprPtr oracle;  // Var leaves name inputs or earlier outputs
    bool per_row = false;        // one value per row of a daily table
    std::string aggregate_of;    // in table layout, the sum of this per-row output
};

enum class Layout { Scalar, DailyTableAllowed };

class SpecError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ProblemSpec {
    std::string id;
    std::string statement;
    std::vector<InputSpec> inputs;
    std::vector<OutputSpec> outputs;
    double tolerance = 1e-9;
    Layout layout = Layout::Scalar;

    const InputSpec* input(std::string_view name) const;
    const OutputSpec* output(std::string_view name) const;

    /// Parses every oracle_text into `oracle`, then checks the invariants.
    /// Throws SpecError.
    void compile();
    void validate() const;
};

using Assignment = std::map<std::string, double, std::less<>>;

class MissingInput : public std::runtime_error {
public:
    explicit MissingInput(const std::string& name) : std::runtime_error("missing input '" + name + "'") {}
};

class DomainViolation : public std::runtime_error {
public:
    DomainViolation(const std::string& name, double v);
};

/// Output name -> value. Checks that every input is present and in domain.
Assignment eval_oracle(const ProblemSpec& spec, const Assignment& inputs);
/// Same, without domain checks; non-numeric results become NaN.
Assignment eval_oracle_unchecked(const ProblemSpec& spec, const Assignment& inputs);

Assignment default_assignment(const ProblemSpec& spec);

}  // namespace erfr
