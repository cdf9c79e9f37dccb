#pragma once

// JSON problem descriptions for the command-line front end.
//
//   {
//     "task": "vi",
//     "space": {"n": 2, "p": 3},
//     "sets": [{"type": "box", "lo": [0, 0], "hi": [1, 1]}],
//     "operator": {"type": "affine", "matrix": [[2, 1], [-1, 2]], "offset": [0, 0]},
//     "f": [1, 1],
//     "x0": [0, 0],
//     "reference": [0.5, 0.5],
//     "solver": {"alpha": 0.2, "max_iter": 1000, "tol": 1e-9, "mode": "generalized"},
//     "verify": {"ps": [1.5, 2, 3, 4], "families": ["inequalities"]}
//   }

#include "genproj/solvers.hpp"
#include "genproj/verify.hpp"

#include <json.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace genproj {

enum class Task { project, feasibility, vi, wiener_hopf, verify, unconstrained };

std::string to_string(Task t);
/// Accepts the spelling used in spec files, e.g. "wiener-hopf".
Task task_from_string(std::string_view s);
ProjectionMode projection_mode_from_string(std::string_view s);

/// A malformed or inconsistent problem description. The message names the
/// offending field, or gives line and column for JSON syntax errors.
class SpecError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct ProblemSpec {
    Task task = Task::project;
    int n = 0;
    double p = 2.0;
    std::vector<ConvexSet> sets;
    std::optional<MonotoneOperator> op;
    std::optional<DualVector> f;
    std::optional<PrimalVector> x0;
    /// A known point of the solution set; enables v2_to_ref in traces and the
    /// feasibility diagnostics.
    std::optional<PrimalVector> reference;
    SolverConfig solver{};
    /// False when the spec leaves alpha to the default for the operator.
    bool alpha_given = false;
    ProjectionMode mode = ProjectionMode::generalized;
    std::optional<NonsmoothVariant> nonsmooth;
    SuiteConfig suite{};

    SpaceContext context() const { return SpaceContext(n, p); }
    /// x0, or the origin when the spec omits it.
    PrimalVector start() const;
};

/// Command-line values that replace their spec-file counterparts.
struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<double> p;
    std::optional<double> alpha;
    std::optional<int> max_iter;
    std::optional<double> tol;
    std::optional<ProjectionMode> mode;
    std::optional<Task> task;
};

/// Parses without task-level validation.
ProblemSpec parse_problem_spec(const nlohmann::json &j);
/// Reads and parses a file; syntax errors become SpecError with line:column.
ProblemSpec load_problem_spec(const std::string &path);
ProblemSpec parse_problem_spec_text(std::string_view text, std::string_view source = "<spec>");

void apply_overrides(ProblemSpec &spec, const Overrides &o);
/// Checks the fields required by the task and the dimensions; throws
/// SpecError. Fills the default alpha for strongly monotone affine operators.
void validate(ProblemSpec &spec);

ConvexSet parse_set(const nlohmann::json &j, int n);
MonotoneOperator parse_operator(const nlohmann::json &j, int n);

} // namespace genproj
