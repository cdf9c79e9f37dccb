#pragma once

// Iterative methods built on the projection operators: successive projections
// for convex feasibility, projection iterations for variational inequalities
// <Ax - f, xi - x> >= 0, the unconstrained dual iteration, the normalized and
// Polyak-step variants, and the Wiener-Hopf iteration.

#include "genproj/projections.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace genproj {

/// Convex functionals available to the subgradient operator.
enum class Functional {
    squared_euclidean, ///< u(x) = ||x - c||_2^2
    l1_distance,       ///< u(x) = sum |x_i - c_i|
    linear,            ///< u(x) = <c, x>
};

/// A monotone operator A : B -> B*.
class MonotoneOperator {
  public:
    /// Ax = Mx + c. Throws std::invalid_argument unless M + M^T is positive
    /// semidefinite.
    static MonotoneOperator affine(Eigen::MatrixXd M, DualVector c);
    /// Ax = a subgradient of u at x.
    static MonotoneOperator subgradient(Functional u, PrimalVector center,
                                        std::optional<double> u_star = std::nullopt);

    DualVector apply(const PrimalVector &x) const;
    int dim() const;

    bool is_affine() const { return affine_; }
    const Eigen::MatrixXd &matrix() const { return M_; }
    const DualVector &offset() const { return c_; }
    /// Smallest eigenvalue of (M + M^T) / 2.
    double monotonicity_constant() const;
    /// Spectral norm of M.
    double operator_norm() const;

    Functional functional() const { return u_; }
    const PrimalVector &center() const { return center_; }
    std::optional<double> u_star() const { return u_star_; }
    /// u(x); throws for affine operators.
    double value(const PrimalVector &x) const;

  private:
    MonotoneOperator() = default;

    bool affine_ = true;
    Eigen::MatrixXd M_;
    DualVector c_;
    Functional u_ = Functional::squared_euclidean;
    PrimalVector center_;
    std::optional<double> u_star_;
};

enum class StepSchedule { constant, diminishing };

struct SolverConfig {
    StepSchedule schedule = StepSchedule::constant;
    /// alpha (constant) or alpha_0 (diminishing: alpha_n = alpha_0 / sqrt(n + 1)).
    double alpha = 0.5;
    int max_iter = 10000;
    double stop_tol = 1e-9;
    std::uint64_t seed = 42;
    /// Iterates with a larger norm abort the run.
    double divergence_bound = 1e12;
    /// Member samples for the terminal VI residual.
    int vi_samples = 1000;
    InnerSolverConfig inner{};

    double alpha_at(int n) const;
    void validate() const;
};

/// alpha = m / ||M||^2 for a strongly monotone affine operator.
double default_alpha(const MonotoneOperator &A);

enum class ProjectionMode { metric, generalized };
enum class NonsmoothVariant { normalized, polyak };

std::string to_string(ProjectionMode m);

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Record n describes iterate x_n and the step taken from it.
struct TraceRecord {
    int iter = 0;
    double step = kNaN;
    double displacement = kNaN; ///< ||x_n - x_{n+1}||
    double v2_to_ref = kNaN;    ///< V2(J x_n, reference)
    double residual_fixed_point = kNaN;
    double residual_vi = kNaN;
    double residual_wh = kNaN;
    PrimalVector x;
};

struct Trace {
    std::string method;
    ProjectionMode mode = ProjectionMode::generalized;
    std::vector<TraceRecord> records;
    /// Successive projections only: x_0 followed by every single-set
    /// projection in application order.
    std::vector<PrimalVector> sub_iterates;
    PrimalVector solution;
    /// Dual iterate at termination (Wiener-Hopf z, or J x for the
    /// unconstrained iteration).
    std::optional<DualVector> dual_solution;
    bool converged = false;
    bool diverged = false;
    int inner_failures = 0;
    int degenerate_steps = 0;
    /// Terminal diagnostics; NaN when not applicable.
    double final_fixed_point_residual = kNaN;
    double final_vi_residual = kNaN;
    double final_wh_residual = kNaN;
    double final_max_set_distance = kNaN;
    /// Wiener-Hopf: ||z - (Jx - alpha(Ax - f))|| and ||x - pi z|| at the end.
    double wh_reconstruction_z = kNaN;
    double wh_reconstruction_x = kNaN;
};

Trace successive_projections(const SpaceContext &ctx, const std::vector<ConvexSet> &sets, const PrimalVector &x0,
                             ProjectionMode mode, const SolverConfig &cfg,
                             const std::optional<PrimalVector> &reference = std::nullopt);

struct FeasibilityDiagnostics {
    bool informational = false; ///< metric-mode runs carry no contract
    double max_v2_increase = 0.0;
    bool monotone = true;        ///< V2(J x_n, xi*) never increases
    double v2_sum = 0.0;
    double v2_tail_max = 0.0;
    bool summable = true;        ///< V2 between successive iterates is summable
    double final_displacement = 0.0;
    bool vanishing_steps = true; ///< ||x_n - x_{n+1}|| -> 0
    bool pass() const { return monotone && summable && vanishing_steps; }
};

/// Convergence diagnostics of successive generalized projections on the
/// ordered sub-iterate sequence. `monotone_slack` bounds the
/// allowed per-step increase of V2(J x_n, xi*), `tol` the tail terms and the
/// final displacement.
FeasibilityDiagnostics feasibility_diagnostics(const SpaceContext &ctx, const Trace &trace, const PrimalVector &xi_star,
                                               double tol = 1e-6, double monotone_slack = 1e-8);

/// x_{n+1} = pi(J x_n - alpha_n (A x_n - f)).
Trace vi_solve_generalized(const SpaceContext &ctx, const ConvexSet &set, const MonotoneOperator &A,
                           const DualVector &f, const PrimalVector &x0, const SolverConfig &cfg,
                           const std::optional<PrimalVector> &reference = std::nullopt);

/// x_{n+1} = P(x_n - alpha_n J*(A x_n - f)). No convergence contract.
Trace vi_solve_metric(const SpaceContext &ctx, const ConvexSet &set, const MonotoneOperator &A,
                      const DualVector &f, const PrimalVector &x0, const SolverConfig &cfg,
                      const std::optional<PrimalVector> &reference = std::nullopt);

/// Normalized step  pi(J x_n - alpha_n g / ||g||)  with g = A x_n - f, or the
/// Polyak step  pi(J x_n - alpha_n (u(x_n) - u*) g / ||g||^2)  for a
/// subgradient operator with known u*.
Trace vi_solve_nonsmooth(const SpaceContext &ctx, const ConvexSet &set, const MonotoneOperator &A,
                         const DualVector &f, const PrimalVector &x0, const SolverConfig &cfg,
                         NonsmoothVariant variant);

/// J x_{n+1} = J x_n - alpha_n (A x_n - f) in the dual space.
Trace unconstrained_solve(const SpaceContext &ctx, const MonotoneOperator &A, const DualVector &f,
                          const PrimalVector &x0, const SolverConfig &cfg);

/// Generalized kind: x_n = pi z_n, z_{n+1} = J x_n - alpha_n (A x_n - f).
/// Metric kind:      x_n = P z_n,  z_{n+1} = x_n - alpha_n J*(A x_n - f).
/// z_0 is built from x_0 by the same update.
Trace wiener_hopf_solve(const SpaceContext &ctx, const ConvexSet &set, const MonotoneOperator &A,
                        const DualVector &f, const PrimalVector &x0, const SolverConfig &cfg,
                        ProjectionMode kind);

// Residuals of the equations equivalent to the VI, usable at any point.

/// ||x - pi(Jx - alpha (Ax - f))||.
double fixed_point_residual_generalized(const SpaceContext &ctx, const ConvexSet &set, const MonotoneOperator &A,
                                        const DualVector &f, const PrimalVector &x, double alpha,
                                        const InnerSolverConfig &inner = {});
/// ||x - P(x - alpha J*(Ax - f))||.
double fixed_point_residual_metric(const SpaceContext &ctx, const ConvexSet &set, const MonotoneOperator &A,
                                   const DualVector &f, const PrimalVector &x, double alpha,
                                   const InnerSolverConfig &inner = {});
/// min over samples (and the exact linear minimizer for bounded sets) of
/// <Ax - f, xi - x>. Nonnegative at a solution.
double vi_residual(const SpaceContext &ctx, const ConvexSet &set, const MonotoneOperator &A, const DualVector &f,
                   const PrimalVector &x, int samples, std::uint64_t seed);
/// ||A pi z + (z - J pi z) / alpha - f||_q.
double wiener_hopf_residual_generalized(const SpaceContext &ctx, const ConvexSet &set, const MonotoneOperator &A,
                                        const DualVector &f, const DualVector &z, double alpha,
                                        const InnerSolverConfig &inner = {});
/// ||J*(A P z - f) + (z - P z) / alpha||_p.
double wiener_hopf_residual_metric(const SpaceContext &ctx, const ConvexSet &set, const MonotoneOperator &A,
                                   const DualVector &f, const PrimalVector &z, double alpha,
                                   const InnerSolverConfig &inner = {});

} // namespace genproj
