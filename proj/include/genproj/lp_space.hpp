#pragma once

// Finite-dimensional l^p arithmetic: norms, the normalized and gauge duality
// mappings, the dual pairing, and modulus-of-convexity/smoothness estimates.

#include <Eigen/Core>

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>

namespace genproj {

using Vec = Eigen::VectorXd;

/// Dimension n and exponent p of R^n with the p-norm. The dual exponent q
/// satisfies 1/p + 1/q = 1.
class SpaceContext {
  public:
    SpaceContext(int n, double p);

    int dim() const { return n_; }
    double p() const { return p_; }
    double q() const { return q_; }
    bool is_hilbert() const { return p_ == 2.0; }

    /// The same dimension with exponent q, i.e. the space B*.
    SpaceContext dual() const { return SpaceContext(n_, q_); }

  private:
    int n_;
    double p_;
    double q_;
};

/// Coordinates tagged with the space they live in. PrimalVector and
/// DualVector share storage but are not interchangeable.
template <class Tag>
class Coords {
  public:
    Coords() = default;
    explicit Coords(Vec v) : v_(std::move(v)) {
        if (!v_.allFinite())
            throw std::invalid_argument("coordinates must be finite");
    }
    Coords(std::initializer_list<double> xs) : v_(static_cast<Eigen::Index>(xs.size())) {
        Eigen::Index i = 0;
        for (double x : xs) v_[i++] = x;
        if (!v_.allFinite())
            throw std::invalid_argument("coordinates must be finite");
    }

    static Coords zero(int n) { return Coords(Vec::Zero(n)); }

    int size() const { return static_cast<int>(v_.size()); }
    const Vec &coords() const { return v_; }
    std::span<const double> span() const { return {v_.data(), static_cast<std::size_t>(v_.size())}; }
    double operator[](int i) const { return v_[i]; }

    Coords &operator+=(const Coords &o) { v_ += o.v_; return *this; }
    Coords &operator-=(const Coords &o) { v_ -= o.v_; return *this; }
    Coords &operator*=(double s) { v_ *= s; return *this; }

    friend Coords operator+(Coords a, const Coords &b) { return a += b; }
    friend Coords operator-(Coords a, const Coords &b) { return a -= b; }
    friend Coords operator*(double s, Coords a) { return a *= s; }
    friend Coords operator*(Coords a, double s) { return a *= s; }
    friend Coords operator/(Coords a, double s) { return a *= 1.0 / s; }
    friend Coords operator-(Coords a) { a.v_ = -a.v_; return a; }
    friend bool operator==(const Coords &a, const Coords &b) { return a.v_ == b.v_; }

  private:
    Vec v_;
};

struct PrimalTag {};
struct DualTag {};
using PrimalVector = Coords<PrimalTag>;
using DualVector = Coords<DualTag>;

// Raw kernels on coordinate spans. The norm is evaluated with max-abs scaling
// so large or tiny entries do not overflow or underflow.
double lp_norm(std::span<const double> x, double p);
double euclid_norm(std::span<const double> x);

double norm(const SpaceContext &ctx, const PrimalVector &x);
double dual_norm(const SpaceContext &ctx, const DualVector &phi);

/// <phi, x> = sum phi_i x_i.
double pairing(const DualVector &phi, const PrimalVector &x);

/// (Jx)_i = ||x||^{2-p} |x_i|^{p-2} x_i, with 0 mapped to 0.
DualVector duality_map(const SpaceContext &ctx, const PrimalVector &x);

/// Normalized duality mapping of l^q; the inverse of duality_map.
PrimalVector duality_map_star(const SpaceContext &ctx, const DualVector &phi);

/// (J^mu x)_i = |x_i|^{p-2} x_i, the gradient of ||x||^p / p.
DualVector gauge_duality_map(const SpaceContext &ctx, const PrimalVector &x);

/// Inverse of the gauge map: the gauge duality mapping of l^q.
PrimalVector gauge_duality_map_star(const SpaceContext &ctx, const DualVector &phi);

/// sign(t) |t|^{e}, with 0 -> 0.
inline double signed_pow(double t, double e) {
    if (t == 0.0) return 0.0;
    return std::copysign(std::pow(std::abs(t), e), t);
}

/// Lower bound on the modulus of convexity delta_B and upper bound on the
/// modulus of smoothness rho_B of l^p, plus Figiel's constant L.
///
///   delta_lower(e) = (p-1) e^2 / 8          1 < p <= 2
///                  = e^p / (p 2^p)          p > 2
///   rho_upper(t)   = t^p / p                1 < p <= 2
///                  = (p-1) t^2 / 2          p >= 2
///
/// L enters every checked inequality on the side that it weakens, so the
/// upper end of its known range is used.
class ModulusEstimates {
  public:
    static constexpr double kFigielL = 3.18;

    explicit ModulusEstimates(double p);

    double p() const { return p_; }
    double figiel_L() const { return kFigielL; }

    double delta_lower(double eps) const;
    double rho_upper(double tau) const;
    /// g(e) = delta_lower(e) / e, extended by continuity at 0.
    double g_lower(double eps) const;

    /// Inverses by monotone bisection on [0, 2]. Arguments beyond the value
    /// at eps = 2 have no preimage in the modulus domain; +inf is returned so
    /// that any bound built from them is vacuous.
    double delta_inverse(double t) const;
    double g_inverse(double t) const;

  private:
    double p_;
};

ModulusEstimates modulus_estimates(const SpaceContext &ctx);

} // namespace genproj
