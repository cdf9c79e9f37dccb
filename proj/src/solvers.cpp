#include "genproj/solvers.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>

namespace genproj {

namespace {

constexpr double kDegenerate = 1e-14;

void require_dim(const SpaceContext &ctx, int n, const char *what) {
    if (n != ctx.dim())
        throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}

bool diverged(const SpaceContext &ctx, const PrimalVector &x, double bound) {
    double nx = norm(ctx, x);
    return !std::isfinite(nx) || nx > bound;
}

double distance(const SpaceContext &ctx, const PrimalVector &a, const PrimalVector &b) {
    return norm(ctx, a - b);
}

} // namespace

// ---------------------------------------------------------------- operators

MonotoneOperator MonotoneOperator::affine(Eigen::MatrixXd M, DualVector c) {
    if (M.rows() != M.cols())
        throw std::invalid_argument("affine operator: matrix must be square");
    if (M.rows() != c.size())
        throw std::invalid_argument("affine operator: offset dimension mismatch");
    if (!M.allFinite())
        throw std::invalid_argument("affine operator: non-finite matrix entry");
    MonotoneOperator A;
    A.affine_ = true;
    A.M_ = std::move(M);
    A.c_ = std::move(c);
    double scale = std::max(1.0, A.M_.cwiseAbs().maxCoeff());
    if (A.monotonicity_constant() < -1e-12 * scale)
        throw std::invalid_argument("affine operator: M + M^T is not positive semidefinite");
    return A;
}

MonotoneOperator MonotoneOperator::subgradient(Functional u, PrimalVector center, std::optional<double> u_star) {
    if (center.size() == 0)
        throw std::invalid_argument("subgradient operator: empty center");
    if (u_star && !std::isfinite(*u_star))
        throw std::invalid_argument("subgradient operator: u_star must be finite");
    MonotoneOperator A;
    A.affine_ = false;
    A.u_ = u;
    A.center_ = std::move(center);
    A.u_star_ = u_star;
    return A;
}

int MonotoneOperator::dim() const { return affine_ ? static_cast<int>(M_.rows()) : center_.size(); }

DualVector MonotoneOperator::apply(const PrimalVector &x) const {
    if (x.size() != dim())
        throw std::invalid_argument("operator apply: dimension mismatch");
    if (affine_)
        return DualVector(Vec(M_ * x.coords() + c_.coords()));
    const Vec &c = center_.coords();
    switch (u_) {
    case Functional::squared_euclidean:
        return DualVector(Vec(2.0 * (x.coords() - c)));
    case Functional::l1_distance:
        return DualVector(Vec((x.coords() - c).unaryExpr([](double t) { return double((t > 0) - (t < 0)); })));
    case Functional::linear:
        return DualVector(c);
    }
    throw std::logic_error("unknown functional");
}

double MonotoneOperator::value(const PrimalVector &x) const {
    if (affine_)
        throw std::invalid_argument("value: affine operators carry no functional");
    const Vec d = x.coords() - center_.coords();
    switch (u_) {
    case Functional::squared_euclidean:
        return d.squaredNorm();
    case Functional::l1_distance:
        return d.lpNorm<1>();
    case Functional::linear:
        return center_.coords().dot(x.coords());
    }
    throw std::logic_error("unknown functional");
}

double MonotoneOperator::monotonicity_constant() const {
    if (!affine_)
        return 0.0;
    Eigen::MatrixXd S = 0.5 * (M_ + M_.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

double MonotoneOperator::operator_norm() const {
    if (!affine_)
        throw std::invalid_argument("operator_norm: defined for affine operators only");
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M_);
    return svd.singularValues()(0);
}

double default_alpha(const MonotoneOperator &A) {
    if (!A.is_affine())
        throw std::invalid_argument("default_alpha: needs an affine operator");
    double m = A.monotonicity_constant();
    double L = A.operator_norm();
    if (m <= 0.0 || L <= 0.0)
        throw std::invalid_argument("default_alpha: operator is not strongly monotone");
    return m / (L * L);
}

// ------------------------------------------------------------------ config

double SolverConfig::alpha_at(int n) const {
    return schedule == StepSchedule::constant ? alpha : alpha / std::sqrt(double(n) + 1.0);
}

void SolverConfig::validate() const {
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw std::invalid_argument("solver config: alpha must be positive");
    if (max_iter < 1)
        throw std::invalid_argument("solver config: max_iter must be >= 1");
    if (!(stop_tol > 0.0))
        throw std::invalid_argument("solver config: stop_tol must be positive");
    if (!(divergence_bound > 0.0))
        throw std::invalid_argument("solver config: divergence_bound must be positive");
    if (vi_samples < 0)
        throw std::invalid_argument("solver config: vi_samples must be >= 0");
    inner.validate();
}

std::string to_string(ProjectionMode m) { return m == ProjectionMode::metric ? "metric" : "generalized"; }

// --------------------------------------------------------------- residuals

double fixed_point_residual_generalized(const SpaceContext &ctx, const ConvexSet &set, const MonotoneOperator &A,
                                        const DualVector &f, const PrimalVector &x, double alpha,
                                        const InnerSolverConfig &inner) {
    DualVector z = duality_map(ctx, x) - alpha * (A.apply(x) - f);
    return distance(ctx, x, generalized_project_pi(ctx, set, z, inner).point);
}

double fixed_point_residual_metric(const SpaceContext &ctx, const ConvexSet &set, const MonotoneOperator &A,
                                   const DualVector &f, const PrimalVector &x, double alpha,
                                   const InnerSolverConfig &inner) {
    PrimalVector z = x - alpha * duality_map_star(ctx, A.apply(x) - f);
    return distance(ctx, x, metric_project(ctx, set, z, inner).point);
}

double vi_residual(const SpaceContext &ctx, const ConvexSet &set, const MonotoneOperator &A, const DualVector &f,
                   const PrimalVector &x, int samples, std::uint64_t seed) {
    DualVector g = A.apply(x) - f;
    double best = std::numeric_limits<double>::infinity();
    auto consider = [&](const PrimalVector &xi) { best = std::min(best, pairing(g, xi - x)); };
    if (set.is_primitive()) {
        SupportPoint s = linear_minimizer(set, g);
        if (s.bounded)
            consider(s.point);
        else
            return -std::numeric_limits<double>::infinity();
        if (samples > 0) {
            std::mt19937_64 rng(seed);
            for (const auto &xi : sample_members(set, rng, samples, x, std::max(1.0, norm(ctx, x))))
                consider(xi);
        }
    }
    consider(x);
    return best;
}

double wiener_hopf_residual_generalized(const SpaceContext &ctx, const ConvexSet &set, const MonotoneOperator &A,
                                        const DualVector &f, const DualVector &z, double alpha,
                                        const InnerSolverConfig &inner) {
    PrimalVector x = generalized_project_pi(ctx, set, z, inner).point;
    DualVector r = A.apply(x) + (1.0 / alpha) * (z - duality_map(ctx, x)) - f;
    return dual_norm(ctx, r);
}

double wiener_hopf_residual_metric(const SpaceContext &ctx, const ConvexSet &set, const MonotoneOperator &A,
                                   const DualVector &f, const PrimalVector &z, double alpha,
                                   const InnerSolverConfig &inner) {
    PrimalVector x = metric_project(ctx, set, z, inner).point;
    PrimalVector r = duality_map_star(ctx, A.apply(x) - f) + (1.0 / alpha) * (z - x);
    return norm(ctx, r);
}

// ---------------------------------------------------- successive projection

Trace successive_projections(const SpaceContext &ctx, const std::vector<ConvexSet> &sets, const PrimalVector &x0,
                             ProjectionMode mode, const SolverConfig &cfg,
                             const std::optional<PrimalVector> &reference) {
    cfg.validate();
    if (sets.empty())
        throw std::invalid_argument("successive projections: no sets");
    require_dim(ctx, x0.size(), "successive projections");
    for (const auto &s : sets) {
        require_dim(ctx, s.dim(), "successive projections");
        if (!s.is_primitive())
            throw std::invalid_argument("successive projections: members must be primitive sets");
    }

    Trace tr;
    tr.method = "successive_projections";
    tr.mode = mode;
    tr.sub_iterates.push_back(x0);

    auto project = [&](const ConvexSet &s, const PrimalVector &x) {
        ProjectionResult r =
            mode == ProjectionMode::metric ? metric_project(ctx, s, x, cfg.inner) : generalized_project_Pi(ctx, s, x, cfg.inner);
        if (!r.converged)
            ++tr.inner_failures;
        return r.point;
    };
    auto max_dist = [&](const PrimalVector &x) {
        double d = 0.0;
        for (const auto &s : sets)
            d = std::max(d, euclid_distance(s, x));
        return d;
    };

    PrimalVector x = x0;
    for (int n = 0;; ++n) {
        PrimalVector y = x;
        for (auto it = sets.rbegin(); it != sets.rend(); ++it) {
            y = project(*it, y);
            tr.sub_iterates.push_back(y);
        }
        TraceRecord rec;
        rec.iter = n;
        rec.x = x;
        rec.displacement = distance(ctx, x, y);
        rec.residual_fixed_point = rec.displacement;
        if (reference)
            rec.v2_to_ref = v2(ctx, x, *reference).value();
        tr.records.push_back(rec);

        if (diverged(ctx, y, cfg.divergence_bound)) {
            tr.diverged = true;
            tr.solution = y;
            break;
        }
        double dist = max_dist(x);
        if (rec.displacement <= cfg.stop_tol && dist <= cfg.stop_tol) {
            tr.converged = true;
            tr.solution = x;
            break;
        }
        if (n >= cfg.max_iter) {
            tr.solution = x;
            break;
        }
        x = y;
    }
    tr.final_max_set_distance = max_dist(tr.solution);
    tr.final_fixed_point_residual = tr.records.back().displacement;
    return tr;
}

FeasibilityDiagnostics feasibility_diagnostics(const SpaceContext &ctx, const Trace &trace, const PrimalVector &xi_star,
                                               double tol, double monotone_slack) {
    FeasibilityDiagnostics rep;
    rep.informational = trace.mode == ProjectionMode::metric;
    const auto &seq = trace.sub_iterates;
    if (seq.size() < 2)
        return rep;
    std::vector<double> terms;
    double prev = v2(ctx, seq[0], xi_star).value();
    for (std::size_t k = 1; k < seq.size(); ++k) {
        double cur = v2(ctx, seq[k], xi_star).value();
        double scale = std::max(1.0, prev);
        rep.max_v2_increase = std::max(rep.max_v2_increase, (cur - prev) / scale);
        prev = cur;
        terms.push_back(v2(ctx, seq[k - 1], seq[k]).value());
    }
    for (double t : terms)
        rep.v2_sum += t;
    std::size_t tail = std::max<std::size_t>(1, terms.size() / 10);
    for (std::size_t k = terms.size() - tail; k < terms.size(); ++k)
        rep.v2_tail_max = std::max(rep.v2_tail_max, terms[k]);
    rep.final_displacement = distance(ctx, seq[seq.size() - 2], seq.back());
    rep.monotone = rep.max_v2_increase <= monotone_slack;
    rep.summable = std::isfinite(rep.v2_sum) && rep.v2_tail_max <= tol;
    rep.vanishing_steps = rep.final_displacement <= tol;
    return rep;
}

// ------------------------------------------------------------- VI solvers

namespace {

using StepFn = std::function<PrimalVector(const PrimalVector &, int, Trace &)>;

// Iterates x_{n+1} = step(x_n, n). Record n holds x_n and ||x_n - x_{n+1}||,
// which is the fixed-point residual of x_n; the run stops at the first x_n
// whose residual is within tolerance.
Trace run_fixed_point(const SpaceContext &ctx, const PrimalVector &x0, const SolverConfig &cfg,
                      const std::optional<PrimalVector> &reference, const StepFn &step, std::string method) {
    Trace tr;
    tr.method = std::move(method);
    PrimalVector x = x0;
    for (int n = 0;; ++n) {
        PrimalVector y = step(x, n, tr);
        TraceRecord rec;
        rec.iter = n;
        rec.x = x;
        rec.step = cfg.alpha_at(n);
        rec.displacement = distance(ctx, x, y);
        rec.residual_fixed_point = rec.displacement;
        if (reference)
            rec.v2_to_ref = v2(ctx, x, *reference).value();
        tr.records.push_back(rec);
        if (rec.displacement <= cfg.stop_tol) {
            tr.converged = true;
            tr.solution = x;
            break;
        }
        if (diverged(ctx, y, cfg.divergence_bound)) {
            tr.diverged = true;
            tr.solution = x;
            break;
        }
        if (n >= cfg.max_iter) {
            tr.solution = x;
            break;
        }
        x = y;
    }
    tr.final_fixed_point_residual = tr.records.back().displacement;
    return tr;
}

void finish_vi(const SpaceContext &ctx, const ConvexSet &set, const MonotoneOperator &A, const DualVector &f,
               const SolverConfig &cfg, Trace &tr) {
    if (tr.diverged)
        return;
    tr.final_vi_residual = vi_residual(ctx, set, A, f, tr.solution, cfg.vi_samples, cfg.seed);
    double alpha = tr.records.back().step;
    DualVector z = duality_map(ctx, tr.solution) - alpha * (A.apply(tr.solution) - f);
    tr.final_wh_residual = wiener_hopf_residual_generalized(ctx, set, A, f, z, alpha, cfg.inner);
    tr.records.back().residual_vi = tr.final_vi_residual;
    tr.records.back().residual_wh = tr.final_wh_residual;
}

void check_problem(const SpaceContext &ctx, const ConvexSet &set, const MonotoneOperator &A, const DualVector &f,
                   const PrimalVector &x0, const char *what) {
    require_dim(ctx, set.dim(), what);
    require_dim(ctx, A.dim(), what);
    require_dim(ctx, f.size(), what);
    require_dim(ctx, x0.size(), what);
    if (!set.is_primitive())
        throw std::invalid_argument(std::string(what) + ": the constraint set must be primitive");
}

} // namespace

Trace vi_solve_generalized(const SpaceContext &ctx, const ConvexSet &set, const MonotoneOperator &A,
                           const DualVector &f, const PrimalVector &x0, const SolverConfig &cfg,
                           const std::optional<PrimalVector> &reference) {
    cfg.validate();
    check_problem(ctx, set, A, f, x0, "vi_solve_generalized");
    StepFn step = [&](const PrimalVector &x, int n, Trace &tr) {
        DualVector z = duality_map(ctx, x) - cfg.alpha_at(n) * (A.apply(x) - f);
        ProjectionResult r = generalized_project_pi(ctx, set, z, cfg.inner);
        if (!r.converged)
            ++tr.inner_failures;
        return r.point;
    };
    Trace tr = run_fixed_point(ctx, x0, cfg, reference, step, "vi_generalized");
    tr.mode = ProjectionMode::generalized;
    finish_vi(ctx, set, A, f, cfg, tr);
    return tr;
}

Trace vi_solve_metric(const SpaceContext &ctx, const ConvexSet &set, const MonotoneOperator &A, const DualVector &f,
                      const PrimalVector &x0, const SolverConfig &cfg, const std::optional<PrimalVector> &reference) {
    cfg.validate();
    check_problem(ctx, set, A, f, x0, "vi_solve_metric");
    StepFn step = [&](const PrimalVector &x, int n, Trace &tr) {
        PrimalVector z = x - cfg.alpha_at(n) * duality_map_star(ctx, A.apply(x) - f);
        ProjectionResult r = metric_project(ctx, set, z, cfg.inner);
        if (!r.converged)
            ++tr.inner_failures;
        return r.point;
    };
    Trace tr = run_fixed_point(ctx, x0, cfg, reference, step, "vi_metric");
    tr.mode = ProjectionMode::metric;
    finish_vi(ctx, set, A, f, cfg, tr);
    return tr;
}

Trace vi_solve_nonsmooth(const SpaceContext &ctx, const ConvexSet &set, const MonotoneOperator &A,
                         const DualVector &f, const PrimalVector &x0, const SolverConfig &cfg,
                         NonsmoothVariant variant) {
    cfg.validate();
    check_problem(ctx, set, A, f, x0, "vi_solve_nonsmooth");
    if (variant == NonsmoothVariant::polyak && (A.is_affine() || !A.u_star()))
        throw std::invalid_argument("polyak step: needs a subgradient operator with known u_star");
    StepFn step = [&](const PrimalVector &x, int n, Trace &tr) {
        DualVector g = A.apply(x) - f;
        double gn = dual_norm(ctx, g);
        if (gn <= kDegenerate) {
            ++tr.degenerate_steps;
            return x;
        }
        double scale = variant == NonsmoothVariant::normalized
                           ? cfg.alpha_at(n) / gn
                           : cfg.alpha_at(n) * std::max(0.0, A.value(x) - *A.u_star()) / (gn * gn);
        ProjectionResult r = generalized_project_pi(ctx, set, duality_map(ctx, x) - scale * g, cfg.inner);
        if (!r.converged)
            ++tr.inner_failures;
        return r.point;
    };
    Trace tr = run_fixed_point(ctx, x0, cfg, std::nullopt, step,
                               variant == NonsmoothVariant::normalized ? "vi_normalized" : "vi_polyak");
    tr.mode = ProjectionMode::generalized;
    if (!tr.diverged) {
        tr.final_vi_residual = vi_residual(ctx, set, A, f, tr.solution, cfg.vi_samples, cfg.seed);
        tr.records.back().residual_vi = tr.final_vi_residual;
    }
    return tr;
}

Trace unconstrained_solve(const SpaceContext &ctx, const MonotoneOperator &A, const DualVector &f,
                          const PrimalVector &x0, const SolverConfig &cfg) {
    cfg.validate();
    require_dim(ctx, A.dim(), "unconstrained_solve");
    require_dim(ctx, f.size(), "unconstrained_solve");
    require_dim(ctx, x0.size(), "unconstrained_solve");
    Trace tr;
    tr.method = "unconstrained";
    tr.mode = ProjectionMode::generalized;
    DualVector w = duality_map(ctx, x0);
    PrimalVector x = x0;
    for (int n = 0;; ++n) {
        DualVector g = A.apply(x) - f;
        DualVector w_next = w - cfg.alpha_at(n) * g;
        PrimalVector y = duality_map_star(ctx, w_next);
        TraceRecord rec;
        rec.iter = n;
        rec.x = x;
        rec.step = cfg.alpha_at(n);
        rec.displacement = distance(ctx, x, y);
        rec.residual_fixed_point = dual_norm(ctx, g);
        tr.records.push_back(rec);
        if (rec.displacement <= cfg.stop_tol && rec.residual_fixed_point <= cfg.stop_tol) {
            tr.converged = true;
            break;
        }
        if (diverged(ctx, y, cfg.divergence_bound)) {
            tr.diverged = true;
            break;
        }
        if (n >= cfg.max_iter)
            break;
        x = y;
        w = w_next;
    }
    tr.solution = x;
    tr.dual_solution = duality_map(ctx, x);
    tr.final_fixed_point_residual = tr.records.back().residual_fixed_point;
    return tr;
}

Trace wiener_hopf_solve(const SpaceContext &ctx, const ConvexSet &set, const MonotoneOperator &A,
                        const DualVector &f, const PrimalVector &x0, const SolverConfig &cfg, ProjectionMode kind) {
    cfg.validate();
    check_problem(ctx, set, A, f, x0, "wiener_hopf_solve");
    Trace tr;
    tr.mode = kind;
    const bool gen = kind == ProjectionMode::generalized;
    tr.method = gen ? "wiener_hopf_generalized" : "wiener_hopf_metric";

    // z is kept in its native space: dual for the generalized kind, primal
    // for the metric kind.
    auto update = [&](const PrimalVector &x, double alpha) -> Vec {
        if (gen)
            return (duality_map(ctx, x) - alpha * (A.apply(x) - f)).coords();
        return (x - alpha * duality_map_star(ctx, A.apply(x) - f)).coords();
    };
    auto project = [&](const Vec &z) {
        ProjectionResult r = gen ? generalized_project_pi(ctx, set, DualVector(z), cfg.inner)
                                 : metric_project(ctx, set, PrimalVector(z), cfg.inner);
        if (!r.converged)
            ++tr.inner_failures;
        return r.point;
    };
    auto residual = [&](const Vec &z, const PrimalVector &x, double alpha) {
        if (gen) {
            DualVector r = A.apply(x) + (1.0 / alpha) * (DualVector(z) - duality_map(ctx, x)) - f;
            return dual_norm(ctx, r);
        }
        PrimalVector r = duality_map_star(ctx, A.apply(x) - f) + (1.0 / alpha) * (PrimalVector(z) - x);
        return norm(ctx, r);
    };

    Vec z = update(x0, cfg.alpha_at(0));
    PrimalVector x = project(z);
    double alpha_z = cfg.alpha_at(0); // the step that produced z
    for (int n = 0;; ++n) {
        double alpha = cfg.alpha_at(n + 1);
        Vec z_next = update(x, alpha);
        PrimalVector y = project(z_next);
        TraceRecord rec;
        rec.iter = n;
        rec.x = x;
        rec.step = alpha_z;
        rec.displacement = distance(ctx, x, y);
        rec.residual_wh = residual(z, x, alpha_z);
        tr.records.push_back(rec);
        if (rec.displacement <= cfg.stop_tol && rec.residual_wh <= cfg.stop_tol) {
            tr.converged = true;
            break;
        }
        if (diverged(ctx, y, cfg.divergence_bound)) {
            tr.diverged = true;
            break;
        }
        if (n >= cfg.max_iter)
            break;
        x = y;
        z = z_next;
        alpha_z = alpha;
    }
    tr.solution = x;
    tr.final_wh_residual = tr.records.back().residual_wh;
    if (gen)
        tr.dual_solution = DualVector(z);
    Vec z_rec = update(x, alpha_z);
    tr.wh_reconstruction_z = gen ? dual_norm(ctx, DualVector(Vec(z - z_rec))) : norm(ctx, PrimalVector(Vec(z - z_rec)));
    tr.wh_reconstruction_x = distance(ctx, x, project(z));
    if (!tr.diverged) {
        tr.final_vi_residual = vi_residual(ctx, set, A, f, x, cfg.vi_samples, cfg.seed);
        tr.records.back().residual_vi = tr.final_vi_residual;
    }
    return tr;
}

} // namespace genproj
