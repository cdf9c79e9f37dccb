#include "genproj/lp_space.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <limits>
#include <string>

namespace genproj {

SpaceContext::SpaceContext(int n, double p) : n_(n), p_(p), q_(0.0) {
    if (n < 1) throw std::invalid_argument("dimension must be at least 1");
    if (!std::isfinite(p) || !(p > 1.0))
        throw std::invalid_argument("exponent p must satisfy 1 < p < inf, got " + std::to_string(p));
    q_ = p / (p - 1.0);
    if (!(q_ > 1.0) || !std::isfinite(q_))
        throw std::invalid_argument("dual exponent is not finite for p = " + std::to_string(p));
}

double lp_norm(std::span<const double> x, double p) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    if (m == 0.0) return 0.0;
    double s = 0.0;
    if (p == 2.0) {
        for (double v : x) {
            const double t = v / m;
            s += t * t;
        }
        return m * std::sqrt(s);
    }
    for (double v : x) s += std::pow(std::abs(v) / m, p);
    return m * std::pow(s, 1.0 / p);
}

double euclid_norm(std::span<const double> x) { return lp_norm(x, 2.0); }

double norm(const SpaceContext &ctx, const PrimalVector &x) { return lp_norm(x.span(), ctx.p()); }

double dual_norm(const SpaceContext &ctx, const DualVector &phi) { return lp_norm(phi.span(), ctx.q()); }

double pairing(const DualVector &phi, const PrimalVector &x) {
    if (phi.size() != x.size())
        throw std::invalid_argument("pairing: dimension mismatch (" + std::to_string(phi.size()) + " vs " +
                                    std::to_string(x.size()) + ")");
    return phi.coords().dot(x.coords());
}

namespace {

// r * sign(v_i) (|v_i| / r)^{e}, r = ||v||_{e+1}. This is ||v||^{1-e} |v_i|^{e-1} v_i
// written so that no intermediate leaves the range of the inputs.
Vec normalized_power(const Vec &v, double e, double r) {
    Vec out(v.size());
    if (r == 0.0) return out.setZero();
    for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = r * signed_pow(v[i] / r, e);
    return out;
}

} // namespace

DualVector duality_map(const SpaceContext &ctx, const PrimalVector &x) {
    if (ctx.is_hilbert()) return DualVector(x.coords());
    return DualVector(normalized_power(x.coords(), ctx.p() - 1.0, norm(ctx, x)));
}

PrimalVector duality_map_star(const SpaceContext &ctx, const DualVector &phi) {
    if (ctx.is_hilbert()) return PrimalVector(phi.coords());
    return PrimalVector(normalized_power(phi.coords(), ctx.q() - 1.0, dual_norm(ctx, phi)));
}

DualVector gauge_duality_map(const SpaceContext &ctx, const PrimalVector &x) {
    Vec out(x.size());
    for (int i = 0; i < x.size(); ++i) out[i] = signed_pow(x[i], ctx.p() - 1.0);
    return DualVector(std::move(out));
}

PrimalVector gauge_duality_map_star(const SpaceContext &ctx, const DualVector &phi) {
    Vec out(phi.size());
    for (int i = 0; i < phi.size(); ++i) out[i] = signed_pow(phi[i], ctx.q() - 1.0);
    return PrimalVector(std::move(out));
}

ModulusEstimates::ModulusEstimates(double p) : p_(p) {
    if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("modulus estimates need 1 < p < inf");
}

double ModulusEstimates::delta_lower(double eps) const {
    if (eps <= 0.0) return 0.0;
    if (p_ <= 2.0) return (p_ - 1.0) * eps * eps / 8.0;
    return std::pow(eps, p_) / (p_ * std::pow(2.0, p_));
}

double ModulusEstimates::rho_upper(double tau) const {
    if (tau <= 0.0) return 0.0;
    if (p_ <= 2.0) return std::pow(tau, p_) / p_;
    return 0.5 * (p_ - 1.0) * tau * tau;
}

double ModulusEstimates::g_lower(double eps) const {
    if (eps <= 0.0) return 0.0;
    return delta_lower(eps) / eps;
}

namespace {

template <class F>
double invert_on_unit_interval(F f, double t) {
    constexpr double kLo = 0.0, kHi = 2.0;
    if (t <= 0.0) return 0.0;
    const double top = f(kHi);
    if (t > top) return std::numeric_limits<double>::infinity();
    if (t == top) return kHi;
    auto within = [](double a, double b) { return std::abs(b - a) <= 1e-12; };
    auto [a, b] = boost::math::tools::bisect([&](double e) { return f(e) - t; }, kLo, kHi, within);
    return 0.5 * (a + b);
}

} // namespace

double ModulusEstimates::delta_inverse(double t) const {
    return invert_on_unit_interval([this](double e) { return delta_lower(e); }, t);
}

double ModulusEstimates::g_inverse(double t) const {
    return invert_on_unit_interval([this](double e) { return g_lower(e); }, t);
}

ModulusEstimates modulus_estimates(const SpaceContext &ctx) { return ModulusEstimates(ctx.p()); }

} // namespace genproj
