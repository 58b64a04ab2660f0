#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lagdeform/geometry.hpp"
#include "lagdeform/sampling.hpp"

namespace lagdeform {

struct Tolerances {
    double identity = 1e-9;
    double classification = 1e-6;
    double trajectory = 1e-4;
    double dependence = 1e-6;
};

/// A validated problem file. Source strings are kept for echoing; the parsed
/// objects have parameters substituted as constants.
struct ProblemSpec {
    std::string name;
    int dim = 0;
    std::map<std::string, double> params;
    std::vector<std::string> spray_source;
    std::string lagrangian_source;
    std::optional<std::vector<std::string>> sigma_source;
    std::optional<std::string> dissipation_source;
    std::optional<double> homogeneity;
    SamplePlan plan;
    Tolerances tolerances;

    SemiSpray spray;
    ScalarField lagrangian;
    std::optional<SemiBasicForm> sigma;
    std::optional<ScalarField> dissipation;
};

/// Throws SchemaError for structural problems and ParseError or
/// UndeclaredIdentifier for bad expressions.
ProblemSpec parse_problem(std::string_view json_text);
ProblemSpec load_problem(const std::string& path);

} // namespace lagdeform
