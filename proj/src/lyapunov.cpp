#include "genproj/lyapunov.hpp"

#include <cmath>

namespace genproj {

LyapunovValue v1(const SpaceContext &ctx, const PrimalVector &x, const PrimalVector &xi) {
    if (!ctx.is_hilbert()) throw std::invalid_argument("v1 is defined only for p = 2");
    const double d = norm(ctx, x - xi);
    return LyapunovValue(d * d);
}

LyapunovValue v2(const SpaceContext &ctx, const PrimalVector &x, const PrimalVector &xi) {
    const double nx = norm(ctx, x);
    const double nxi = norm(ctx, xi);
    return LyapunovValue(nx * nx - 2.0 * pairing(duality_map(ctx, x), xi) + nxi * nxi);
}

DualVector v2_grad_xi(const SpaceContext &ctx, const PrimalVector &x, const PrimalVector &xi) {
    return 2.0 * (duality_map(ctx, xi) - duality_map(ctx, x));
}

LyapunovValue v3(const SpaceContext &ctx, const PrimalVector &x, const PrimalVector &xi) {
    const DualVector jmu = gauge_duality_map(ctx, x);
    const double a = std::pow(dual_norm(ctx, jmu), ctx.q()) / ctx.q();
    const double c = std::pow(norm(ctx, xi), ctx.p()) / ctx.p();
    return LyapunovValue(a - pairing(jmu, xi) + c);
}

LyapunovValue v4(const SpaceContext &ctx, const DualVector &phi, const PrimalVector &xi) {
    const double nphi = dual_norm(ctx, phi);
    const double nxi = norm(ctx, xi);
    return LyapunovValue(nphi * nphi - 2.0 * pairing(phi, xi) + nxi * nxi);
}

DualVector v4_grad_xi(const SpaceContext &ctx, const DualVector &phi, const PrimalVector &xi) {
    return 2.0 * (duality_map(ctx, xi) - phi);
}

PrimalVector v4_grad_phi(const SpaceContext &ctx, const DualVector &phi, const PrimalVector &xi) {
    return 2.0 * (duality_map_star(ctx, phi) - xi);
}

V2Bounds v2_bounds(const SpaceContext &ctx, const PrimalVector &x, const PrimalVector &xi) {
    const ModulusEstimates mod = modulus_estimates(ctx);
    const double L = mod.figiel_L();
    const double nx = norm(ctx, x);
    const double nxi = norm(ctx, xi);
    const double dist = norm(ctx, x - xi);
    const double c = 2.0 * std::max(1.0, std::sqrt(0.5 * (nx * nx + nxi * nxi)));
    V2Bounds b{};
    b.lower = (nx - nxi) * (nx - nxi);
    b.upper = (nx + nxi) * (nx + nxi);
    b.modulus_lower = mod.delta_lower(dist / c) / L;
    b.modulus_upper = mod.rho_upper(8.0 * L * c * dist) / L;
    b.c = c;
    return b;
}

} // namespace genproj
