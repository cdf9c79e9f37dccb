#pragma once

// Closed convex set primitives with membership tests, exact Euclidean
// projections, samplers, and Hausdorff-distance perturbations.

#include "genproj/lp_space.hpp"

#include <random>
#include <string>
#include <variant>
#include <vector>

namespace genproj {

class ConvexSet;

/// {xi : <a, xi> <= b}
struct Halfspace {
    DualVector a;
    double b;
};

/// {xi : <a, xi> = b}
struct Hyperplane {
    DualVector a;
    double b;
};

/// {xi : lo <= xi <= hi}
struct Box {
    PrimalVector lo;
    PrimalVector hi;
};

/// Euclidean ball {xi : ||xi - center||_2 <= radius}.
struct Ball2 {
    PrimalVector center;
    double radius;
};

/// {xi >= 0 : sum xi_i = scale} in R^dim.
struct Simplex {
    int dim;
    double scale;
};

struct Intersection {
    std::vector<ConvexSet> members;
};

class ConvexSet {
  public:
    using Variant = std::variant<Halfspace, Hyperplane, Box, Ball2, Simplex, Intersection>;

    // Factories check the nonemptiness invariants and throw
    // std::invalid_argument when they fail.
    static ConvexSet halfspace(DualVector a, double b);
    static ConvexSet hyperplane(DualVector a, double b);
    static ConvexSet box(PrimalVector lo, PrimalVector hi);
    static ConvexSet ball2(PrimalVector center, double radius);
    static ConvexSet simplex(int dim, double scale);
    static ConvexSet intersection(std::vector<ConvexSet> members);

    const Variant &variant() const { return v_; }
    int dim() const;
    bool is_primitive() const { return !std::holds_alternative<Intersection>(v_); }
    bool is_bounded() const;
    std::string type_name() const;

    template <class T>
    const T *as() const { return std::get_if<T>(&v_); }

  private:
    explicit ConvexSet(Variant v) : v_(std::move(v)) {}
    Variant v_;
};

/// Euclidean distance from x to the set; for an intersection, the largest
/// distance to any member.
double euclid_distance(const ConvexSet &set, const PrimalVector &x);

/// True iff the Euclidean distance from x to the set is at most tol.
bool contains(const ConvexSet &set, const PrimalVector &x, double tol);

/// Nearest point in the Euclidean norm. Intersections are not projected by
/// a single oracle; std::invalid_argument is thrown for them.
PrimalVector euclid_project(const ConvexSet &set, const PrimalVector &x);

/// A minimizer of <g, xi> over the set. `bounded` is false when the linear
/// function is unbounded below there (then `point` is meaningless).
/// Intersections throw std::invalid_argument.
struct SupportPoint {
    bool bounded;
    PrimalVector point;
};
SupportPoint linear_minimizer(const ConvexSet &set, const DualVector &g);

/// A point of the set.
PrimalVector witness_point(const ConvexSet &set);

/// Set-specific samples of member points: vertices or boundary points plus
/// interior draws. Unbounded sets are sampled inside the Euclidean ball of
/// the given radius around `around` (projected when outside).
std::vector<PrimalVector> sample_members(const ConvexSet &set, std::mt19937_64 &rng, int count,
                                         const PrimalVector &around, double radius);

/// A set at l^p Hausdorff distance exactly sigma from the original.
/// Supported: Halfspace and Hyperplane (offset b), Box (uniform inflation),
/// Ball2 (radius; p = 2 only, where the radial gap is the distance).
ConvexSet perturb(const SpaceContext &ctx, const ConvexSet &set, double sigma);

/// Exact l^p Hausdorff distance for Box/Box, parallel Halfspace and Hyperplane
/// pairs with the same normal, and concentric Ball2 pairs at p = 2. Other
/// pairs throw std::invalid_argument.
double hausdorff_distance(const SpaceContext &ctx, const ConvexSet &a, const ConvexSet &b);

/// Simplex Euclidean projection by sort-and-threshold.
Vec project_simplex(const Vec &x, double scale);

} // namespace genproj
