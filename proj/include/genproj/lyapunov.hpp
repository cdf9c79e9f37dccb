#pragma once

// Lyapunov functionals V1..V4, their gradients, and the two-sided bounds of V2.

#include "genproj/lp_space.hpp"

#include <algorithm>

namespace genproj {

/// A nonnegative Lyapunov value. Rounding can push the algebraic expression
/// a few ulps below zero at coincident arguments; those are clamped.
class LyapunovValue {
  public:
    explicit LyapunovValue(double v) : v_(std::max(v, 0.0)) {}
    double value() const { return v_; }

  private:
    double v_;
};

/// ||x - xi||^2. Defined only in the Hilbert case.
LyapunovValue v1(const SpaceContext &ctx, const PrimalVector &x, const PrimalVector &xi);

/// V2(Jx, xi) = ||x||^2 - 2 <Jx, xi> + ||xi||^2.
LyapunovValue v2(const SpaceContext &ctx, const PrimalVector &x, const PrimalVector &xi);

/// grad_xi V2(Jx, xi) = 2 (J xi - J x).
DualVector v2_grad_xi(const SpaceContext &ctx, const PrimalVector &x, const PrimalVector &xi);

/// V3(J^mu x, xi) = ||J^mu x||_q^q / q - <J^mu x, xi> + ||xi||^p / p.
LyapunovValue v3(const SpaceContext &ctx, const PrimalVector &x, const PrimalVector &xi);

/// V4(phi, xi) = ||phi||_q^2 - 2 <phi, xi> + ||xi||^2.
LyapunovValue v4(const SpaceContext &ctx, const DualVector &phi, const PrimalVector &xi);

/// grad_xi V4(phi, xi) = 2 (J xi - phi).
DualVector v4_grad_xi(const SpaceContext &ctx, const DualVector &phi, const PrimalVector &xi);

/// grad_phi V4(phi, xi) = 2 (J* phi - xi). At phi = Jx this is 2 (x - xi).
PrimalVector v4_grad_phi(const SpaceContext &ctx, const DualVector &phi, const PrimalVector &xi);

struct V2Bounds {
    double lower;          ///< (||x|| - ||xi||)^2
    double upper;          ///< (||x|| + ||xi||)^2
    double modulus_lower;  ///< L^{-1} delta(||x - xi|| / C)
    double modulus_upper;  ///< L^{-1} rho(8 L C ||x - xi||); informational only
    double c;              ///< C = 2 max{1, sqrt((||x||^2 + ||xi||^2) / 2)}
};

V2Bounds v2_bounds(const SpaceContext &ctx, const PrimalVector &x, const PrimalVector &xi);

} // namespace genproj
