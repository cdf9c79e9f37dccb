#include "genproj/instance_generator.hpp"

#include <cmath>
#include <stdexcept>

namespace genproj {

std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t index) {
    return mix_seed(mix_seed(mix_seed(base) ^ stream) ^ index);
}

void GeneratorConfig::validate() const {
    if (min_dim < 1 || max_dim < min_dim)
        throw std::invalid_argument("generator: need 1 <= min_dim <= max_dim");
    if (!(magnitude > 0.0))
        throw std::invalid_argument("generator: magnitude must be positive");
}

InstanceGenerator::InstanceGenerator(GeneratorConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

std::uint64_t InstanceGenerator::instance_seed(std::uint64_t stream, std::uint64_t index) const {
    return derive_seed(cfg_.seed, stream, index);
}

int InstanceGenerator::dimension(std::mt19937_64 &rng) const {
    return std::uniform_int_distribution<int>(cfg_.min_dim, cfg_.max_dim)(rng);
}

Vec InstanceGenerator::vector(std::mt19937_64 &rng, int n) const {
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> unit;
    double scale = cfg_.magnitude * std::pow(10.0, -1.5 + 2.0 * unit(rng));
    Vec v(n);
    for (int i = 0; i < n; ++i)
        v[i] = unit(rng) < 0.1 ? 0.0 : scale * gauss(rng);
    return v;
}

ConvexSet InstanceGenerator::box(std::mt19937_64 &rng, int n) const {
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> width(0.2, 1.5);
    Vec lo(n), hi(n);
    for (int i = 0; i < n; ++i) {
        double c = gauss(rng);
        double w = width(rng);
        lo[i] = c - w;
        hi[i] = c + w;
    }
    return ConvexSet::box(PrimalVector(lo), PrimalVector(hi));
}

ConvexSet InstanceGenerator::halfspace(std::mt19937_64 &rng, int n) const {
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> offset(-1.0, 1.0);
    Vec a(n);
    do {
        for (int i = 0; i < n; ++i)
            a[i] = gauss(rng);
    } while (a.norm() < 1e-3);
    return ConvexSet::halfspace(DualVector(a), offset(rng) * a.norm());
}

ConvexSet InstanceGenerator::set(std::mt19937_64 &rng, int n) const {
    switch (cfg_.set_family) {
    case SetFamily::box:
        return box(rng, n);
    case SetFamily::halfspace:
        return halfspace(rng, n);
    case SetFamily::mixed:
        break;
    }
    int kind = std::uniform_int_distribution<int>(0, 3)(rng);
    if (kind == 0)
        return box(rng, n);
    if (kind == 1)
        return halfspace(rng, n);
    if (kind == 2) {
        ConvexSet h = halfspace(rng, n);
        const Halfspace &hs = *h.as<Halfspace>();
        return ConvexSet::hyperplane(hs.a, hs.b);
    }
    return ConvexSet::simplex(n, std::uniform_real_distribution<double>(0.5, 2.0)(rng));
}

VIInstance InstanceGenerator::vi_instance(std::uint64_t seed, double p, int n) const {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> unit;
    Vec lo(n), hi(n);
    for (int i = 0; i < n; ++i) {
        lo[i] = 0.25 + 0.75 * unit(rng);
        hi[i] = lo[i] + 0.5 + unit(rng);
    }
    Eigen::MatrixXd B(n, n), K(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            B(i, j) = 0.5 * gauss(rng);
            K(i, j) = 0.3 * gauss(rng);
        }
    double m = 0.5 + 0.5 * unit(rng);
    Eigen::MatrixXd M = B.transpose() * B / double(n) + m * Eigen::MatrixXd::Identity(n, n) + (K - K.transpose());
    Vec c(n), f(n), x0(n);
    for (int i = 0; i < n; ++i) {
        c[i] = 0.5 * gauss(rng);
        f[i] = 2.0 * gauss(rng);
        x0[i] = lo[i] + (hi[i] - lo[i]) * unit(rng);
    }
    auto A = MonotoneOperator::affine(M, DualVector(c));
    return VIInstance{SpaceContext(n, p), ConvexSet::box(PrimalVector(lo), PrimalVector(hi)), A, DualVector(f),
                      PrimalVector(x0), default_alpha(A)};
}

FeasibilityInstance InstanceGenerator::feasibility_instance(std::uint64_t seed, double p, int n, int m) const {
    if (m < 1)
        throw std::invalid_argument("feasibility instance: need at least one set");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> unit;
    Vec xi(n);
    for (int i = 0; i < n; ++i)
        xi[i] = gauss(rng);
    std::vector<ConvexSet> sets;
    Vec outward = Vec::Zero(n);
    for (int k = 0; k < m; ++k) {
        Vec a(n);
        do {
            for (int i = 0; i < n; ++i)
                a[i] = gauss(rng);
        } while (a.norm() < 1e-3);
        a /= a.norm();
        outward += a;
        sets.push_back(ConvexSet::halfspace(DualVector(a), a.dot(xi) + unit(rng)));
    }
    // Start beyond the sets along the summed outward normals so that the
    // first sweep is active.
    Vec dir = outward.norm() > 1e-6 ? Vec(outward / outward.norm()) : Vec(Vec::Unit(n, 0));
    for (int i = 0; i < n; ++i)
        dir[i] += 0.3 * gauss(rng);
    Vec x0 = xi + (3.0 + 3.0 * unit(rng)) * dir / dir.norm();
    return FeasibilityInstance{SpaceContext(n, p), std::move(sets), PrimalVector(xi), PrimalVector(x0)};
}

} // namespace genproj
