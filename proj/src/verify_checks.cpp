#include "verify_internal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace genproj {

namespace {

bool starts_with(std::string_view s, std::string_view prefix) { return s.substr(0, prefix.size()) == prefix; }

nlohmann::json number(double v) {
    if (!std::isfinite(v))
        return nullptr;
    return v;
}

double sq(double t) { return t * t; }

} // namespace

double Tolerance::allowed(double lhs, double rhs, double terms) const {
    double scale = std::max(1.0, std::isfinite(terms) ? std::abs(terms) : 0.0);
    if (std::isfinite(lhs))
        scale = std::max(scale, std::abs(lhs));
    if (std::isfinite(rhs))
        scale = std::max(scale, std::abs(rhs));
    return abs + rel * scale;
}

Tolerance tolerance(std::string_view id) {
    if (id == "duality.roundtrip")
        return {0.0, 0.0};
    if (starts_with(id, "duality."))
        return {0.0, 1e-9};
    if (starts_with(id, "ineq.clarkson"))
        return {1e-10, 1e-10};
    if (starts_with(id, "ineq.") || starts_with(id, "lyapunov."))
        return {1e-9, 1e-9};
    // Solver-level checks carry their threshold in the rhs.
    if (starts_with(id, "feasibility.") || starts_with(id, "vi.") || starts_with(id, "wh."))
        return {0.0, 0.0};
    if (id == "stability.hausdorff")
        return {1e-12, 1e-12};
    return {1e-8, 1e-8};
}

nlohmann::json to_json(const CheckReport &r) {
    return {{"check_id", r.check_id}, {"instance_seed", r.instance_seed}, {"lhs", number(r.lhs)},
            {"rhs", number(r.rhs)},   {"slack", number(r.slack)},         {"allowed", r.allowed}, {"pass", r.pass},
            {"informational", r.informational}, {"samples", r.samples},   {"context", r.context}};
}

CheckAccumulator::CheckAccumulator(std::string check_id, std::uint64_t seed, bool informational)
    : id_(std::move(check_id)), seed_(seed), informational_(informational), tol_(tolerance(id_)) {}

void CheckAccumulator::add(double lhs, double rhs, double slack, double scale) {
    if (std::isnan(slack))
        slack = -std::numeric_limits<double>::infinity();
    const double allowed = tol_.allowed(lhs, rhs, scale);
    const double margin = slack + allowed;
    if (samples_ == 0 || margin < margin_) {
        margin_ = margin;
        allowed_ = allowed;
        lhs_ = lhs;
        rhs_ = rhs;
        slack_ = slack;
    }
    ++samples_;
}

void CheckAccumulator::add_le(double lhs, double rhs, double scale) { add(lhs, rhs, rhs - lhs, scale); }
void CheckAccumulator::add_ge(double lhs, double rhs, double scale) { add(lhs, rhs, lhs - rhs, scale); }
void CheckAccumulator::add_eq(double lhs, double rhs, double scale) { add(lhs, rhs, -std::abs(lhs - rhs), scale); }

CheckReport CheckAccumulator::finish(nlohmann::json context) const {
    CheckReport r;
    r.check_id = id_;
    r.instance_seed = seed_;
    r.lhs = lhs_;
    r.rhs = rhs_;
    r.slack = slack_;
    r.allowed = allowed_;
    r.pass = samples_ == 0 || margin_ >= 0.0;
    r.informational = informational_;
    r.samples = samples_;
    r.context = std::move(context);
    return r;
}

namespace detail {

CheckAccumulator &AccumulatorSet::get(const std::string &id, bool informational) {
    auto it = index_.find(id);
    if (it != index_.end())
        return accs_[it->second];
    index_.emplace(id, accs_.size());
    accs_.emplace_back(id, seed_, informational);
    return accs_.back();
}

std::vector<CheckReport> AccumulatorSet::finish(const nlohmann::json &context) const {
    std::vector<CheckReport> out;
    out.reserve(accs_.size());
    for (const auto &a : accs_)
        out.push_back(a.finish(context));
    return out;
}

void inequality_corpus(const SpaceContext &ctx, const PrimalVector &x, const PrimalVector &y, AccumulatorSet &acc) {
    const double p = ctx.p();
    const ModulusEstimates mod(p);
    const double L = mod.figiel_L();
    const double nx = norm(ctx, x), ny = norm(ctx, y);
    const double nsum = norm(ctx, x + y), ndiff = norm(ctx, x - y);

    // Duality map identities on x.
    const DualVector jx = duality_map(ctx, x);
    acc.get("duality.pairing").add_eq(pairing(jx, x), nx * nx);
    acc.get("duality.norm").add_eq(dual_norm(ctx, jx), nx);
    acc.get("duality.roundtrip").add_le(norm(ctx, duality_map_star(ctx, jx) - x), 1e-8 * nx);

    if (p >= 2.0) {
        for (double s : {p, p + 1.0}) {
            double lhs = std::pow(nsum, s);
            double rhs = std::pow(2.0, s - 1.0) * (std::pow(nx, s) + std::pow(ny, s)) - std::pow(ndiff, s);
            double terms = std::pow(2.0, s - 1.0) * (std::pow(nx, s) + std::pow(ny, s));
            acc.get(s == p ? "ineq.clarkson" : "ineq.clarkson_higher_order").add_le(lhs, rhs, terms);
        }
        // ||y||^p >= ||x||^p + p <J^mu x, y - x> + 2^{1-p} ||x - y||^p
        double lin = p * pairing(gauge_duality_map(ctx, x), y - x);
        double rhs = std::pow(nx, p) + lin + std::pow(2.0, 1.0 - p) * std::pow(ndiff, p);
        acc.get("ineq.power_norm_convexity").add_ge(std::pow(ny, p), rhs, std::pow(nx, p) + std::abs(lin));
    }
    if (p <= 2.0)
        acc.get("ineq.parallelogram_p_le_2")
            .add_le(nsum * nsum, 2 * nx * nx + 2 * ny * ny - (p - 1.0) * ndiff * ndiff, 2 * nx * nx + 2 * ny * ny);

    const double defect = 2 * nx * nx + 2 * ny * ny - nsum * nsum;
    const double terms = 2 * nx * nx + 2 * ny * ny;
    const double c1 = 2.0 * std::max(L, 0.5 * (nx + ny));
    acc.get("ineq.parallelogram_upper").add_le(defect, 4 * ndiff * ndiff + c1 * mod.rho_upper(ndiff), terms);
    const double c2 = 2.0 * std::max(1.0, std::sqrt(0.5 * (nx * nx + ny * ny)));
    acc.get("ineq.parallelogram_lower").add_ge(defect, mod.delta_lower(ndiff / c2) / L, terms);
    // ||x||^2 <= ||y||^2 + 2 <Jx, x - y> - (2L)^{-1} delta(||x - y|| / C2)
    const double lin = 2.0 * pairing(jx, x - y);
    acc.get("ineq.square_norm_convexity")
        .add_le(nx * nx, ny * ny + lin - mod.delta_lower(ndiff / c2) / (2.0 * L), ny * ny + std::abs(lin));

    // V2 bounds with xi = y.
    const double v = v2(ctx, x, y).value();
    const V2Bounds b = v2_bounds(ctx, x, y);
    const double vs = b.upper;
    acc.get("lyapunov.norm_lower").add_ge(v, b.lower, vs);
    acc.get("lyapunov.norm_upper").add_le(v, b.upper, vs);
    acc.get("lyapunov.modulus_lower").add_ge(v, b.modulus_lower, vs);
    acc.get("lyapunov.modulus_upper", true).add_le(v, b.modulus_upper, vs);
}

void strong_uniqueness(const SpaceContext &ctx, const PrimalVector &x, const PrimalVector &xbar,
                       std::span<const PrimalVector> xi_samples, AccumulatorSet &acc) {
    const double p = ctx.p();
    const ModulusEstimates mod(p);
    const double L = mod.figiel_L();
    const double d = norm(ctx, x - xbar);
    for (const auto &xi : xi_samples) {
        const double dx = norm(ctx, x - xi);
        const double db = norm(ctx, xbar - xi);
        if (p <= 2.0) {
            acc.get("su.square").add_le(d * d, dx * dx - (p - 1.0) * db * db, dx * dx);
            acc.get("su.square_half").add_le(d * d, dx * dx - 0.5 * (p - 1.0) * db * db, dx * dx);
        }
        if (p >= 2.0) {
            for (double s : {p, p + 1.0}) {
                acc.get(s == p ? "su.power" : "su.power_higher_order")
                    .add_le(std::pow(d, s), std::pow(dx, s) - std::pow(2.0, 1.0 - s) * std::pow(db, s),
                            std::pow(dx, s));
            }
        }
        const double c2 = 2.0 * std::max(1.0, std::sqrt(0.5 * (d * d + dx * dx)));
        acc.get("su.modulus").add_le(d * d, dx * dx - mod.delta_lower(db / c2) / (2.0 * L), dx * dx);

        // Smarzewski-type bound: q = 2, lambda = (p-1)/8 for p <= 2;
        // q = p, lambda = 1/(p 2^p) for p > 2.
        const double q = p <= 2.0 ? 2.0 : p;
        const double lambda = p <= 2.0 ? (p - 1.0) / 8.0 : 1.0 / (p * std::pow(2.0, p));
        acc.get("su.smarzewski").add_le(std::pow(d, q), std::pow(dx, q) - lambda * std::pow(db, q), std::pow(dx, q));
        acc.get("su.smarzewski_dual")
            .add_le(std::pow(db, q), (std::pow(dx, q) - std::pow(d, q)) / lambda, std::pow(dx, q) / lambda);
    }
}

void operator_properties(const SpaceContext &ctx, const ConvexSet &set, const PrimalVector &x,
                         std::span<const PrimalVector> xi_samples,
                         std::span<const std::pair<PrimalVector, PrimalVector>> pairs, const InnerSolverConfig &inner,
                         AccumulatorSet &acc) {
    const double p = ctx.p();
    const bool banach = !ctx.is_hilbert();
    const ModulusEstimates mod(p), mod_dual(ctx.q());
    const double L = mod.figiel_L();

    auto P = [&](const PrimalVector &z) { return metric_project(ctx, set, z, inner).point; };
    auto Pi = [&](const PrimalVector &z) { return generalized_project_Pi(ctx, set, z, inner).point; };
    auto pi = [&](const DualVector &z) { return generalized_project_pi(ctx, set, z, inner).point; };
    auto J = [&](const PrimalVector &z) { return duality_map(ctx, z); };

    const PrimalVector xbar = P(x);
    const PrimalVector xhat = Pi(x);
    const DualVector jx = J(x);
    const DualVector jxhat = J(xhat);
    const DualVector jres = J(x - xbar);
    // pi acts on arbitrary dual elements; phi reuses the coordinates of x.
    const DualVector phi(x.coords());
    const PrimalVector phit = pi(phi);
    const DualVector jphit = J(phit);
    const PrimalVector xtil = pi(jx);
    const DualVector jxtil = J(xtil);
    const PrimalVector xgauge = gauge_project(ctx, set, x, inner).point;
    const DualVector gx = gauge_duality_map(ctx, x);
    const DualVector gxgauge = gauge_duality_map(ctx, xgauge);

    acc.get("composition.Pi_equals_pi_J").add_eq(norm(ctx, xhat - xtil), 0.0);
    acc.get("composition.pi_equals_Pi_Jstar").add_eq(norm(ctx, phit - Pi(duality_map_star(ctx, phi))), 0.0);
    if (!banach) {
        double spread = std::max({norm(ctx, xbar - xhat), norm(ctx, xbar - xtil), norm(ctx, xhat - xtil),
                                  norm(ctx, xbar - xgauge)});
        acc.get("hilbert.collapse").add_eq(spread, 0.0);
    }

    for (const auto &xi : xi_samples) {
        const DualVector jxi = J(xi);
        acc.get("P.fixed").add_eq(norm(ctx, P(xi) - xi), 0.0);
        acc.get("Pi.fixed").add_eq(norm(ctx, Pi(xi) - xi), 0.0);
        acc.get("pi.J_fixed").add_eq(norm(ctx, pi(jxi) - xi), 0.0);

        acc.get("P.variational").add_ge(pairing(jres, xbar - xi), 0.0);
        acc.get("P.variational_outer").add_ge(pairing(jres, x - xi), 0.0);
        acc.get("P.characterization").add_ge(pairing(jres, x - xi), sq(norm(ctx, x - xbar)));
        acc.get("P.variational_inner", banach).add_ge(pairing(J(x - xi), xbar - xi), 0.0);
        acc.get("P.absolute_best", banach)
            .add_le(sq(norm(ctx, xbar - xi)), sq(norm(ctx, x - xi)) - sq(norm(ctx, x - xbar)), sq(norm(ctx, x - xi)));

        acc.get("Pi.variational").add_ge(pairing(jx - jxhat, xhat - xi), 0.0);
        acc.get("Pi.variational_inner").add_ge(pairing(jx - jxi, xhat - xi), 0.0);
        acc.get("Pi.variational_outer").add_ge(pairing(jx - jxhat, x - xi), 0.0);
        const double v_x_xi = v2(ctx, x, xi).value();
        const double v_hat_xi = v2(ctx, xhat, xi).value();
        acc.get("Pi.absolute_best").add_le(v_hat_xi, v_x_xi - v2(ctx, x, xhat).value(), v_x_xi);
        acc.get("Pi.conditionally_nonexpansive").add_le(v_hat_xi, v_x_xi);

        acc.get("pi.variational").add_ge(pairing(phi - jphit, phit - xi), 0.0);
        acc.get("pi.variational_inner").add_ge(pairing(phi - jxi, phit - xi), 0.0);
        acc.get("pi.variational_outer").add_ge(pairing(jx - jxtil, x - xi), 0.0);
        const double v4_phi_xi = v4(ctx, phi, xi).value();
        const double v4_jt_xi = v4(ctx, jphit, xi).value();
        acc.get("pi.absolute_best").add_le(v4_jt_xi, v4_phi_xi - v4(ctx, phi, phit).value(), v4_phi_xi);
        acc.get("pi.conditionally_nonexpansive").add_le(v4_jt_xi, v4_phi_xi);

        acc.get("gauge.variational").add_ge(pairing(gx - gxgauge, xgauge - xi), 0.0);
        acc.get("gauge.absolute_best")
            .add_le(v3(ctx, x, xgauge).value(), v3(ctx, x, xi).value() - v3(ctx, xgauge, xi).value(),
                    v3(ctx, x, xi).value());
    }

    for (const auto &[a, b] : pairs) {
        const PrimalVector abar = P(a), bbar = P(b);
        const double dbar = norm(ctx, abar - bbar);
        const double dab = norm(ctx, a - b);
        acc.get("P.accretive_complement").add_ge(pairing(J(a - abar) - J(b - bbar), abar - bbar), 0.0);
        acc.get("P.monotone", banach).add_ge(pairing(J(a - b), abar - bbar), 0.0);
        acc.get("P.nonexpansive", banach).add_le(dbar, dab);
        acc.get("P.strongly_monotone", banach).add_ge(pairing(J(a - b), abar - bbar), dbar * dbar);
        {
            const double C = 2.0 * std::max({1.0, norm(ctx, a - bbar), norm(ctx, b - abar)});
            acc.get("P.continuity_g")
                .add_le(dbar, C * mod.g_inverse(2.0 * L * C * C * mod_dual.g_inverse(2.0 * C * L * dab)));
            acc.get("P.continuity_rho").add_le(dbar, C * mod.delta_inverse(mod.rho_upper(8.0 * C * L * dab)));
        }

        const PrimalVector ahat = Pi(a), bhat = Pi(b);
        const DualVector ja = J(a), jb = J(b), jahat = J(ahat), jbhat = J(bhat);
        const double dhat = norm(ctx, ahat - bhat);
        const double acc_Pi = pairing(ja - jb, ahat - bhat);
        acc.get("Pi.d_accretive").add_ge(acc_Pi, 0.0);
        {
            const double C = 2.0 * std::max({1.0, norm(ctx, a), norm(ctx, b), norm(ctx, ahat), norm(ctx, bhat)});
            acc.get("Pi.continuity")
                .add_le(dhat, C * mod.g_inverse(2.0 * L * C * C * mod_dual.g_inverse(2.0 * L * C * dab)));
            const double C7 = 2.0 * std::max({1.0, norm(ctx, ahat), norm(ctx, bhat)});
            acc.get("Pi.strongly_accretive").add_ge(acc_Pi, mod.delta_lower(dhat / C7) / (2.0 * L));
        }
        acc.get("Pi.accretive_complement").add_ge(pairing((ja - jahat) - (jb - jbhat), ahat - bhat), 0.0);

        const DualVector pa(a.coords()), pb(b.coords());
        const PrimalVector ta = pi(pa), tb = pi(pb);
        const double dt = norm(ctx, ta - tb);
        const double mono = pairing(pa - pb, ta - tb);
        acc.get("pi.monotone").add_ge(mono, 0.0);
        {
            const double C = 2.0 * std::max({1.0, norm(ctx, ta), norm(ctx, tb)});
            acc.get("pi.continuity").add_le(dt, C * mod.g_inverse(2.0 * L * C * dual_norm(ctx, pa - pb)));
            acc.get("pi.strongly_monotone").add_ge(mono, mod.delta_lower(dt / C) / (2.0 * L));
        }
        acc.get("pi.accretive_complement").add_ge(pairing((pa - J(ta)) - (pb - J(tb)), ta - tb), 0.0);
    }
}

} // namespace detail

// ------------------------------------------------------------ public checks

CheckReport check_clarkson(const SpaceContext &ctx, const PrimalVector &x, const PrimalVector &y,
                           std::uint64_t seed) {
    const double p = ctx.p();
    if (p < 2.0)
        throw std::invalid_argument("check_clarkson: requires p >= 2");
    const double lhs = std::pow(norm(ctx, x + y), p);
    const double terms = std::pow(2.0, p - 1.0) * (std::pow(norm(ctx, x), p) + std::pow(norm(ctx, y), p));
    const double rhs = terms - std::pow(norm(ctx, x - y), p);
    CheckAccumulator acc("ineq.clarkson", seed);
    acc.add_le(lhs, rhs, terms);
    return acc.finish({{"p", p}, {"n", ctx.dim()}});
}

CheckReport check_parallelogram_upper(const SpaceContext &ctx, const PrimalVector &x, const PrimalVector &y,
                                      std::uint64_t seed) {
    const ModulusEstimates mod = modulus_estimates(ctx);
    const double nx = norm(ctx, x), ny = norm(ctx, y), nd = norm(ctx, x - y), ns = norm(ctx, x + y);
    const double c1 = 2.0 * std::max(mod.figiel_L(), 0.5 * (nx + ny));
    CheckAccumulator acc("ineq.parallelogram_upper", seed);
    acc.add_le(2 * nx * nx + 2 * ny * ny - ns * ns, 4 * nd * nd + c1 * mod.rho_upper(nd), 2 * nx * nx + 2 * ny * ny);
    return acc.finish({{"p", ctx.p()}, {"n", ctx.dim()}});
}

CheckReport check_parallelogram_lower(const SpaceContext &ctx, const PrimalVector &x, const PrimalVector &y,
                                      std::uint64_t seed) {
    const ModulusEstimates mod = modulus_estimates(ctx);
    const double nx = norm(ctx, x), ny = norm(ctx, y), nd = norm(ctx, x - y), ns = norm(ctx, x + y);
    const double c2 = 2.0 * std::max(1.0, std::sqrt(0.5 * (nx * nx + ny * ny)));
    CheckAccumulator acc("ineq.parallelogram_lower", seed);
    acc.add_ge(2 * nx * nx + 2 * ny * ny - ns * ns, mod.delta_lower(nd / c2) / mod.figiel_L(),
               2 * nx * nx + 2 * ny * ny);
    return acc.finish({{"p", ctx.p()}, {"n", ctx.dim()}});
}

std::vector<CheckReport> check_strong_uniqueness(const SpaceContext &ctx, const ConvexSet &set,
                                                 const PrimalVector &x, std::span<const PrimalVector> xi_samples,
                                                 std::uint64_t seed, const InnerSolverConfig &inner) {
    detail::AccumulatorSet acc(seed);
    const PrimalVector xbar = metric_project(ctx, set, x, inner).point;
    detail::strong_uniqueness(ctx, x, xbar, xi_samples, acc);
    return acc.finish({{"p", ctx.p()}, {"n", ctx.dim()}, {"set", set.type_name()}});
}

std::vector<CheckReport> check_operator_properties(const SpaceContext &ctx, const ConvexSet &set,
                                                   const PrimalVector &x, std::span<const PrimalVector> xi_samples,
                                                   std::span<const std::pair<PrimalVector, PrimalVector>> pairs,
                                                   std::uint64_t seed, const InnerSolverConfig &inner) {
    detail::AccumulatorSet acc(seed);
    detail::operator_properties(ctx, set, x, xi_samples, pairs, inner, acc);
    return acc.finish({{"p", ctx.p()}, {"n", ctx.dim()}, {"set", set.type_name()}});
}

} // namespace genproj
