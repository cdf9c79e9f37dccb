#pragma once

// The metric projection P, the generalized projection Pi (argmin of V2(Jx, .))
// and the generalized projection pi from the dual space (argmin of V4(phi, .)),
// computed by inner convex minimization over a primitive set.

#include "genproj/convex_sets.hpp"
#include "genproj/lyapunov.hpp"

#include <span>
#include <variant>

namespace genproj {

struct FixedStep {
    double eta;
};
struct Backtracking {
    double beta = 0.5;
    double c = 1e-4;
};
using StepRule = std::variant<FixedStep, Backtracking>;

enum class InnerMethod {
    /// Optimality-system root solve, polished by projected gradient when
    /// rounding leaves the residual above tolerance.
    automatic,
    /// Euclidean projected gradient for every primitive.
    projected_gradient,
};

struct InnerSolverConfig {
    double tol = 1e-9;
    int max_iter = 100000;
    StepRule step_rule = Backtracking{};
    InnerMethod method = InnerMethod::automatic;

    void validate() const;
};

struct ProjectionResult {
    PrimalVector point;
    /// Attained value of the defining functional: ||x - xbar||^2, V2(Jx, xhat)
    /// or V4(phi, phitilde).
    double objective = 0.0;
    int inner_iterations = 0;
    /// Norm of the unit-step projected-gradient mapping at `point`.
    double kkt_residual = 0.0;
    bool converged = false;
};

ProjectionResult metric_project(const SpaceContext &ctx, const ConvexSet &set, const PrimalVector &x,
                                const InnerSolverConfig &cfg = {});

ProjectionResult generalized_project_Pi(const SpaceContext &ctx, const ConvexSet &set, const PrimalVector &x,
                                        const InnerSolverConfig &cfg = {});

ProjectionResult generalized_project_pi(const SpaceContext &ctx, const ConvexSet &set, const DualVector &phi,
                                        const InnerSolverConfig &cfg = {});

/// argmin over the set of V3(J^mu x, .), the gauge-map analogue of Pi.
ProjectionResult gauge_project(const SpaceContext &ctx, const ConvexSet &set, const PrimalVector &x,
                               const InnerSolverConfig &cfg = {});

/// ||Pi x - pi(Jx)||.
double composition_identity_residual(const SpaceContext &ctx, const ConvexSet &set, const PrimalVector &x,
                                     const InnerSolverConfig &cfg = {});

/// The three projections of one point: P x, Pi x and pi(Jx).
struct ProjectionTriple {
    ProjectionResult metric;
    ProjectionResult Pi;
    ProjectionResult pi_of_Jx;
};

ProjectionTriple project_all(const SpaceContext &ctx, const ConvexSet &set, const PrimalVector &x,
                             const InnerSolverConfig &cfg = {});

/// Minimum slack of each variational characterization over the samples.
/// All are >= 0 (up to solver tolerance) at exact projections.
struct CharacterizationReport {
    double P_variational = 0.0;     ///< <J(x - xbar), xbar - xi>
    double P_distance = 0.0;        ///< <J(x - xbar), x - xi>
    double P_distance_strong = 0.0; ///< <J(x - xbar), x - xi> - ||x - xbar||^2
    double Pi_variational = 0.0;    ///< <Jx - J xhat, xhat - xi>
    double Pi_cross = 0.0;          ///< <Jx - J xi, xhat - xi>
    double Pi_distance = 0.0;       ///< <Jx - J xhat, x - xi>
    double pi_variational = 0.0;    ///< <phi - J phitilde, phitilde - xi>,  phi = Jx
    double pi_cross = 0.0;          ///< <phi - J xi, phitilde - xi>
    double pi_distance = 0.0;       ///< <Jx - J xtilde, x - xi>,  xtilde = pi(Jx)
    int samples = 0;
};

CharacterizationReport characterization_residuals(const SpaceContext &ctx, const PrimalVector &x,
                                                  const ProjectionTriple &proj,
                                                  std::span<const PrimalVector> samples);

} // namespace genproj
