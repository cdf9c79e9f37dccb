#include "genproj/projections.hpp"

#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>

namespace genproj {

void InnerSolverConfig::validate() const {
    if (!(tol > 0.0)) throw std::invalid_argument("inner solver: tol must be positive");
    if (max_iter < 1) throw std::invalid_argument("inner solver: max_iter must be at least 1");
    if (const auto *f = std::get_if<FixedStep>(&step_rule); f && !(f->eta > 0.0))
        throw std::invalid_argument("inner solver: fixed step must be positive");
    if (const auto *b = std::get_if<Backtracking>(&step_rule);
        b && !(b->beta > 0.0 && b->beta < 1.0 && b->c > 0.0 && b->c < 1.0))
        throw std::invalid_argument("inner solver: backtracking needs 0 < beta < 1 and 0 < c < 1");
}

namespace {

// Every projection here minimizes, over a primitive set,
//
//   squared kind:  F(xi) = ||xi - s||^2     - 2 <phi, xi> + ||phi||_q^2
//   gauge kind:    F(xi) = ||xi - s||^p / p -   <phi, xi> + ||phi||_q^q / q
//
// P uses (s, phi) = (x, 0), Pi uses (0, Jx), pi uses (0, phi) and the
// V3 projection uses the gauge kind with (0, J^mu x).
enum class Kind { squared, gauge };

struct Objective {
    const SpaceContext &ctx;
    Kind kind;
    Vec shift;
    Vec linear;
    double constant;

    double value(const Vec &xi) const {
        const Vec d = xi - shift;
        const double nd = lp_norm({d.data(), static_cast<std::size_t>(d.size())}, ctx.p());
        if (kind == Kind::squared) return nd * nd - 2.0 * linear.dot(xi) + constant;
        return std::pow(nd, ctx.p()) / ctx.p() - linear.dot(xi) + constant;
    }

    Vec gradient(const Vec &xi) const {
        const PrimalVector d(xi - shift);
        if (kind == Kind::squared) return 2.0 * (duality_map(ctx, d).coords() - linear);
        return gauge_duality_map(ctx, d).coords() - linear;
    }
};

Objective make_objective(const SpaceContext &ctx, Kind kind, Vec shift, Vec linear) {
    const double nq = lp_norm({linear.data(), static_cast<std::size_t>(linear.size())}, ctx.q());
    const double constant = kind == Kind::squared ? nq * nq : std::pow(nq, ctx.q()) / ctx.q();
    return Objective{ctx, kind, std::move(shift), std::move(linear), constant};
}

void check_input(const ConvexSet &set, int n) {
    if (!set.is_primitive()) throw std::invalid_argument("projection: set must be a primitive (not an intersection)");
    if (set.dim() != n) throw std::invalid_argument("projection: set and point differ in dimension");
}

double kkt_residual(const ConvexSet &set, const Objective &obj, const Vec &xi) {
    const Vec g = obj.gradient(xi);
    return (xi - euclid_project(set, PrimalVector(xi - g)).coords()).norm();
}

// Root of a scalar function on a sign-changing bracket, to a few ulps.
template <class F>
double bracketed_root(F f, double lo, double hi, double flo, double fhi) {
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    // Rounding can leave both ends on one side when the bracket is a few ulps wide.
    if ((flo > 0.0) == (fhi > 0.0)) return std::abs(flo) <= std::abs(fhi) ? lo : hi;
    auto tol = [](double a, double b) {
        return std::abs(b - a) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(a), std::abs(b));
    };
    std::uintmax_t iters = 300;
    auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, iters);
    return 0.5 * (a + b);
}

// Minimizer over the set of  sum_i w |xi_i - s_i|^p / p - <phi, xi>  (w > 0).
// Coordinatewise the unconstrained minimizer is s_i + psi^{-1}(c_i / w) with
// psi(t) = |t|^{p-2} t; the constraint enters through one scalar multiplier.
class SeparableSolver {
  public:
    SeparableSolver(const SpaceContext &ctx, const ConvexSet &set, const Vec &shift, const Vec &linear)
        : set_(set), shift_(shift), linear_(linear), p_(ctx.p()), inv_exp_(1.0 / (ctx.p() - 1.0)) {}

    static bool supports(const ConvexSet &set) { return set.is_primitive(); }

    Vec solve(double w) const {
        const double scale = std::pow(w, -inv_exp_);
        if (const auto *b = set_.as<Box>())
            return free_point(Vec::Zero(linear_.size()), scale).cwiseMax(b->lo.coords()).cwiseMin(b->hi.coords());
        if (const auto *h = set_.as<Halfspace>()) return solve_affine(h->a.coords(), h->b, scale, true);
        if (const auto *h = set_.as<Hyperplane>()) return solve_affine(h->a.coords(), h->b, scale, false);
        if (const auto *b = set_.as<Ball2>()) return solve_ball(*b, w, scale);
        return solve_simplex(set_.as<Simplex>()->scale, scale);
    }

  private:
    // s + scale * psi^{-1}(phi - shift_term)
    Vec free_point(const Vec &multiplier_term, double scale) const {
        Vec out(linear_.size());
        for (Eigen::Index i = 0; i < out.size(); ++i)
            out[i] = shift_[i] + scale * signed_pow(linear_[i] - multiplier_term[i], inv_exp_);
        return out;
    }

    Vec solve_affine(const Vec &a, double b, double scale, bool inequality) const {
        auto at = [&](double lambda) { return free_point(lambda * a, scale); };
        auto excess = [&](double lambda) { return a.dot(at(lambda)) - b; };
        const double f0 = excess(0.0);
        if (f0 == 0.0 || (inequality && f0 < 0.0)) return at(0.0);
        // excess is decreasing in lambda; grow the bracket on the side of the root.
        const double dir = f0 > 0.0 ? 1.0 : -1.0;
        double step = std::max(1.0, linear_.cwiseAbs().maxCoeff() / a.cwiseAbs().maxCoeff());
        double lo = 0.0, flo = f0, hi = dir * step, fhi = excess(hi);
        for (int k = 0; k < 2100 && fhi * dir > 0.0; ++k) {
            lo = hi;
            flo = fhi;
            step *= 2.0;
            hi = dir * step;
            fhi = excess(hi);
        }
        if (lo > hi) {
            std::swap(lo, hi);
            std::swap(flo, fhi);
        }
        return at(bracketed_root(excess, lo, hi, flo, fhi));
    }

    Vec solve_simplex(double total, double scale) const {
        const Eigen::Index n = linear_.size();
        auto at = [&](double nu) -> Vec { return free_point(Vec::Constant(n, nu), scale).cwiseMax(0.0); };
        auto excess = [&](double nu) { return at(nu).sum() - total; };
        double step = 1.0 + linear_.cwiseAbs().maxCoeff();
        double lo = -step, hi = step;
        double flo = excess(lo), fhi = excess(hi);
        for (int k = 0; k < 2100 && flo < 0.0; ++k) {
            lo *= 2.0;
            flo = excess(lo);
        }
        for (int k = 0; k < 2100 && fhi > 0.0; ++k) {
            hi *= 2.0;
            fhi = excess(hi);
        }
        return at(bracketed_root(excess, lo, hi, flo, fhi));
    }

    // Coordinate i solves w psi(t - s_i) + lambda (t - c_i) = phi_i, whose
    // root lies between the free point and c_i; lambda is fixed by the radius.
    Vec solve_ball(const Ball2 &ball, double w, double scale) const {
        const Vec &c = ball.center.coords();
        const Vec free = free_point(Vec::Zero(linear_.size()), scale);
        const double f0 = (free - c).norm() - ball.radius;
        if (f0 <= 0.0) return free;
        auto at = [&](double lambda) -> Vec {
            Vec out(free.size());
            for (Eigen::Index i = 0; i < out.size(); ++i) {
                auto g = [&](double t) { return w * signed_pow(t - shift_[i], p_ - 1.0) + lambda * (t - c[i]) - linear_[i]; };
                const double lo = std::min(free[i], c[i]), hi = std::max(free[i], c[i]);
                out[i] = lo == hi ? lo : bracketed_root(g, lo, hi, g(lo), g(hi));
            }
            return out;
        };
        auto excess = [&](double lambda) { return (at(lambda) - c).norm() - ball.radius; };
        double lo = 0.0, flo = f0, hi = 1.0, fhi = excess(hi);
        for (int k = 0; k < 2100 && fhi > 0.0; ++k) {
            lo = hi;
            flo = fhi;
            hi *= 2.0;
            fhi = excess(hi);
        }
        return at(bracketed_root(excess, lo, hi, flo, fhi));
    }

    const ConvexSet &set_;
    const Vec &shift_;
    const Vec &linear_;
    double p_;
    double inv_exp_;
};

// Solve the optimality system: for the squared kind the gradient
// 2(J(xi - s) - phi) depends on xi - s only through the scalar r = ||xi - s||
// and the separable gauge term, so xi = xi(r) and r is a fixed point of
// r = ||xi(r) - s||. The gauge kind is separable outright.
std::optional<ProjectionResult> solve_optimality_system(const SpaceContext &ctx, const ConvexSet &set,
                                                        const Objective &obj) {
    if (!SeparableSolver::supports(set)) return std::nullopt;
    SeparableSolver sep(ctx, set, obj.shift, obj.linear);
    ProjectionResult res;
    Vec xi;
    if (obj.kind == Kind::gauge || ctx.is_hilbert()) {
        xi = sep.solve(1.0);
        res.inner_iterations = 1;
    } else {
        const double p = ctx.p();
        int evals = 0;
        auto point_at = [&](double r) {
            ++evals;
            return sep.solve(std::pow(r, 2.0 - p));
        };
        auto h = [&](double r) {
            const Vec d = point_at(r) - obj.shift;
            return lp_norm({d.data(), static_cast<std::size_t>(d.size())}, p) - r;
        };
        const Vec d0 = euclid_project(set, PrimalVector(obj.shift + duality_map_star(ctx, DualVector(obj.linear)).coords()))
                           .coords() -
                       obj.shift;
        const double r0 = std::max(1e-3, lp_norm({d0.data(), static_cast<std::size_t>(d0.size())}, p));
        double lo = r0, hi = r0;
        double flo = h(r0), fhi = flo;
        if (flo >= 0.0) {
            for (int k = 0; k < 2000 && fhi >= 0.0 && std::isfinite(hi); ++k) {
                lo = hi;
                flo = fhi;
                hi *= 2.0;
                fhi = h(hi);
            }
        } else {
            for (int k = 0; k < 2000 && flo < 0.0 && lo > 1e-150; ++k) {
                hi = lo;
                fhi = flo;
                lo *= 0.5;
                flo = h(lo);
            }
        }
        if (flo < 0.0) {
            // The minimizer sits at xi = s (r = 0).
            xi = point_at(lo);
        } else if (!(fhi < 0.0)) {
            return std::nullopt;
        } else {
            xi = point_at(bracketed_root(h, lo, hi, flo, fhi));
        }
        res.inner_iterations = evals;
    }
    if (!xi.allFinite()) return std::nullopt;
    res.point = PrimalVector(xi);
    res.objective = std::max(0.0, obj.value(xi));
    res.kkt_residual = kkt_residual(set, obj, xi);
    if (!std::isfinite(res.kkt_residual)) return std::nullopt;
    return res;
}

ProjectionResult projected_gradient(const ConvexSet &set, const Objective &obj, const Vec &start,
                                    const InnerSolverConfig &cfg) {
    ProjectionResult res;
    Vec x = euclid_project(set, PrimalVector(start)).coords();
    double fx = obj.value(x);
    double eta = std::holds_alternative<FixedStep>(cfg.step_rule) ? std::get<FixedStep>(cfg.step_rule).eta : 0.5;
    int k = 0;
    for (; k < cfg.max_iter; ++k) {
        const Vec g = obj.gradient(x);
        const double pg = (x - euclid_project(set, PrimalVector(x - g)).coords()).norm();
        if (pg <= cfg.tol) {
            res.converged = true;
            break;
        }
        Vec next;
        if (const auto *bt = std::get_if<Backtracking>(&cfg.step_rule)) {
            eta = std::min(eta * 2.0, 1e6);
            double fnext = 0.0;
            for (;;) {
                next = euclid_project(set, PrimalVector(x - eta * g)).coords();
                fnext = obj.value(next);
                const double decrease = bt->c * g.dot(next - x);
                if (fnext <= fx + decrease + 1e-15 * std::abs(fx) || eta < 1e-300) break;
                eta *= bt->beta;
            }
            fx = fnext;
        } else {
            next = euclid_project(set, PrimalVector(x - eta * g)).coords();
            fx = obj.value(next);
        }
        if (next == x) {
            // No representable progress; the residual is as small as it gets.
            break;
        }
        x = std::move(next);
    }
    res.point = PrimalVector(x);
    res.inner_iterations = k;
    res.objective = std::max(0.0, obj.value(x));
    res.kkt_residual = kkt_residual(set, obj, x);
    res.converged = res.kkt_residual <= cfg.tol;
    return res;
}

ProjectionResult minimize(const SpaceContext &ctx, const ConvexSet &set, const Objective &obj, const Vec &start,
                          const InnerSolverConfig &cfg) {
    cfg.validate();
    if (cfg.method == InnerMethod::automatic) {
        if (auto res = solve_optimality_system(ctx, set, obj)) {
            // The root solve is exact to rounding. Rounding in J near zero
            // coordinates (p < 2) can leave a residual above tol; polish those
            // with projected gradient from the root-solve point.
            if (res->kkt_residual <= cfg.tol) {
                res->converged = true;
                return *res;
            }
            ProjectionResult pg = projected_gradient(set, obj, res->point.coords(), cfg);
            pg.inner_iterations += res->inner_iterations;
            return pg.kkt_residual <= res->kkt_residual ? pg : *res;
        }
    }
    return projected_gradient(set, obj, start, cfg);
}

// Points within rounding of the set are their own projection under P, Pi
// and the gauge projection.
std::optional<ProjectionResult> member_result(const ConvexSet &set, const PrimalVector &x) {
    const double scale = std::max(1.0, x.size() ? x.coords().cwiseAbs().maxCoeff() : 0.0);
    const double dist = euclid_distance(set, x);
    if (!(dist <= 16.0 * std::numeric_limits<double>::epsilon() * scale)) return std::nullopt;
    ProjectionResult res;
    res.point = x;
    res.kkt_residual = dist;
    res.converged = true;
    return res;
}

} // namespace

ProjectionResult metric_project(const SpaceContext &ctx, const ConvexSet &set, const PrimalVector &x,
                                const InnerSolverConfig &cfg) {
    check_input(set, x.size());
    if (auto res = member_result(set, x)) return *res;
    const Objective obj = make_objective(ctx, Kind::squared, x.coords(), Vec::Zero(x.size()));
    return minimize(ctx, set, obj, x.coords(), cfg);
}

ProjectionResult generalized_project_Pi(const SpaceContext &ctx, const ConvexSet &set, const PrimalVector &x,
                                        const InnerSolverConfig &cfg) {
    check_input(set, x.size());
    if (auto res = member_result(set, x)) return *res;
    const Objective obj = make_objective(ctx, Kind::squared, Vec::Zero(x.size()), duality_map(ctx, x).coords());
    return minimize(ctx, set, obj, x.coords(), cfg);
}

ProjectionResult generalized_project_pi(const SpaceContext &ctx, const ConvexSet &set, const DualVector &phi,
                                        const InnerSolverConfig &cfg) {
    check_input(set, phi.size());
    const PrimalVector start = duality_map_star(ctx, phi);
    const Objective obj = make_objective(ctx, Kind::squared, Vec::Zero(phi.size()), phi.coords());
    return minimize(ctx, set, obj, start.coords(), cfg);
}

ProjectionResult gauge_project(const SpaceContext &ctx, const ConvexSet &set, const PrimalVector &x,
                               const InnerSolverConfig &cfg) {
    check_input(set, x.size());
    if (auto res = member_result(set, x)) return *res;
    const Objective obj =
        make_objective(ctx, Kind::gauge, Vec::Zero(x.size()), gauge_duality_map(ctx, x).coords());
    return minimize(ctx, set, obj, x.coords(), cfg);
}

double composition_identity_residual(const SpaceContext &ctx, const ConvexSet &set, const PrimalVector &x,
                                     const InnerSolverConfig &cfg) {
    const PrimalVector a = generalized_project_Pi(ctx, set, x, cfg).point;
    const PrimalVector b = generalized_project_pi(ctx, set, duality_map(ctx, x), cfg).point;
    return norm(ctx, a - b);
}

ProjectionTriple project_all(const SpaceContext &ctx, const ConvexSet &set, const PrimalVector &x,
                             const InnerSolverConfig &cfg) {
    return {metric_project(ctx, set, x, cfg), generalized_project_Pi(ctx, set, x, cfg),
            generalized_project_pi(ctx, set, duality_map(ctx, x), cfg)};
}

CharacterizationReport characterization_residuals(const SpaceContext &ctx, const PrimalVector &x,
                                                  const ProjectionTriple &proj,
                                                  std::span<const PrimalVector> samples) {
    CharacterizationReport rep;
    rep.samples = static_cast<int>(samples.size());
    if (samples.empty()) return rep;

    const PrimalVector &xbar = proj.metric.point;
    const PrimalVector &xhat = proj.Pi.point;
    const PrimalVector &xtil = proj.pi_of_Jx.point;
    const DualVector jres = duality_map(ctx, x - xbar);
    const DualVector jx = duality_map(ctx, x);
    const DualVector jxhat = duality_map(ctx, xhat);
    const DualVector jxtil = duality_map(ctx, xtil);
    const double dist = norm(ctx, x - xbar);

    constexpr double inf = std::numeric_limits<double>::infinity();
    rep.P_variational = rep.P_distance = rep.P_distance_strong = rep.Pi_variational = rep.Pi_cross = rep.Pi_distance = rep.pi_variational = rep.pi_cross = rep.pi_distance = inf;
    for (const PrimalVector &xi : samples) {
        const DualVector jxi = duality_map(ctx, xi);
        rep.P_variational = std::min(rep.P_variational, pairing(jres, xbar - xi));
        const double distance = pairing(jres, x - xi);
        rep.P_distance = std::min(rep.P_distance, distance);
        rep.P_distance_strong = std::min(rep.P_distance_strong, distance - dist * dist);
        rep.Pi_variational = std::min(rep.Pi_variational, pairing(jx - jxhat, xhat - xi));
        rep.Pi_cross = std::min(rep.Pi_cross, pairing(jx - jxi, xhat - xi));
        rep.Pi_distance = std::min(rep.Pi_distance, pairing(jx - jxhat, x - xi));
        rep.pi_variational = std::min(rep.pi_variational, pairing(jx - jxtil, xtil - xi));
        rep.pi_cross = std::min(rep.pi_cross, pairing(jx - jxi, xtil - xi));
        rep.pi_distance = std::min(rep.pi_distance, pairing(jx - jxtil, x - xi));
    }
    return rep;
}

} // namespace genproj
