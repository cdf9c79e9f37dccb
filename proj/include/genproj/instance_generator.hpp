#pragma once

// Seeded random instances for the verification suite. Every instance is a
// pure function of its 64-bit seed, so instances can be built in any order
// and on any thread.

#include "genproj/solvers.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace genproj {

/// splitmix64 finalizer.
std::uint64_t mix_seed(std::uint64_t x);
/// Seed for stream `stream`, item `index` under a base seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t index);

enum class SetFamily { mixed, box, halfspace };

struct GeneratorConfig {
    std::uint64_t seed = 42;
    int min_dim = 2;
    int max_dim = 6;
    /// Scale of random points.
    double magnitude = 2.0;
    SetFamily set_family = SetFamily::mixed;

    void validate() const;
};

struct VIInstance {
    SpaceContext ctx;
    ConvexSet set;
    MonotoneOperator A;
    DualVector f;
    PrimalVector x0;
    double alpha;
};

struct FeasibilityInstance {
    SpaceContext ctx;
    std::vector<ConvexSet> sets;
    PrimalVector xi_star;
    PrimalVector x0;
};

class InstanceGenerator {
  public:
    explicit InstanceGenerator(GeneratorConfig cfg);

    const GeneratorConfig &config() const { return cfg_; }
    std::uint64_t instance_seed(std::uint64_t stream, std::uint64_t index) const;

    int dimension(std::mt19937_64 &rng) const;
    /// Gaussian coordinates at a random scale, with occasional exact zeros.
    Vec vector(std::mt19937_64 &rng, int n) const;
    ConvexSet box(std::mt19937_64 &rng, int n) const;
    ConvexSet halfspace(std::mt19937_64 &rng, int n) const;
    /// A set from the configured family.
    ConvexSet set(std::mt19937_64 &rng, int n) const;

    /// Strongly monotone affine operator over a box in the positive orthant,
    /// with alpha = m / ||M||^2.
    VIInstance vi_instance(std::uint64_t seed, double p, int n) const;
    /// `m` halfspaces sharing the point xi_star, and a start point outside.
    FeasibilityInstance feasibility_instance(std::uint64_t seed, double p, int n, int m = 3) const;

  private:
    GeneratorConfig cfg_;
};

} // namespace genproj
