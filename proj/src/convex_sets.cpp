#include "genproj/convex_sets.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

namespace genproj {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require(bool ok, const char *msg) {
    if (!ok) throw std::invalid_argument(msg);
}

double clamp_distance(const Box &b, const Vec &x) {
    const Vec c = x.cwiseMax(b.lo.coords()).cwiseMin(b.hi.coords());
    return (x - c).norm();
}

// Same normal up to a positive factor, within relative rounding.
bool same_direction(const Vec &a, const Vec &b) {
    const double na = a.norm(), nb = b.norm();
    if (na == 0.0 || nb == 0.0) return false;
    return (a / na - b / nb).norm() <= 1e-12;
}

} // namespace

ConvexSet ConvexSet::halfspace(DualVector a, double b) {
    require(a.size() >= 1, "halfspace: empty normal");
    require(a.coords().squaredNorm() > 0.0, "halfspace: normal must be nonzero");
    require(std::isfinite(b), "halfspace: offset must be finite");
    return ConvexSet(Halfspace{std::move(a), b});
}

ConvexSet ConvexSet::hyperplane(DualVector a, double b) {
    require(a.size() >= 1, "hyperplane: empty normal");
    require(a.coords().squaredNorm() > 0.0, "hyperplane: normal must be nonzero");
    require(std::isfinite(b), "hyperplane: offset must be finite");
    return ConvexSet(Hyperplane{std::move(a), b});
}

ConvexSet ConvexSet::box(PrimalVector lo, PrimalVector hi) {
    require(lo.size() >= 1 && lo.size() == hi.size(), "box: bounds must have equal nonzero length");
    require((lo.coords().array() <= hi.coords().array()).all(), "box: lo must not exceed hi");
    return ConvexSet(Box{std::move(lo), std::move(hi)});
}

ConvexSet ConvexSet::ball2(PrimalVector center, double radius) {
    require(center.size() >= 1, "ball: empty center");
    require(std::isfinite(radius) && radius > 0.0, "ball: radius must be positive");
    return ConvexSet(Ball2{std::move(center), radius});
}

ConvexSet ConvexSet::simplex(int dim, double scale) {
    require(dim >= 1, "simplex: dimension must be positive");
    require(std::isfinite(scale) && scale > 0.0, "simplex: scale must be positive");
    return ConvexSet(Simplex{dim, scale});
}

ConvexSet ConvexSet::intersection(std::vector<ConvexSet> members) {
    require(!members.empty(), "intersection: needs at least one member");
    const int n = members.front().dim();
    for (const auto &m : members) require(m.dim() == n, "intersection: members differ in dimension");
    return ConvexSet(Intersection{std::move(members)});
}

int ConvexSet::dim() const {
    return std::visit(overloaded{
                          [](const Halfspace &s) { return s.a.size(); },
                          [](const Hyperplane &s) { return s.a.size(); },
                          [](const Box &s) { return s.lo.size(); },
                          [](const Ball2 &s) { return s.center.size(); },
                          [](const Simplex &s) { return s.dim; },
                          [](const Intersection &s) { return s.members.front().dim(); },
                      },
                      v_);
}

bool ConvexSet::is_bounded() const {
    return std::visit(overloaded{
                          [](const Halfspace &) { return false; },
                          [](const Hyperplane &s) { return s.a.size() == 1; },
                          [](const Box &) { return true; },
                          [](const Ball2 &) { return true; },
                          [](const Simplex &) { return true; },
                          [](const Intersection &s) {
                              return std::any_of(s.members.begin(), s.members.end(),
                                                 [](const ConvexSet &m) { return m.is_bounded(); });
                          },
                      },
                      v_);
}

std::string ConvexSet::type_name() const {
    static const char *names[] = {"halfspace", "hyperplane", "box", "ball2", "simplex", "intersection"};
    return names[v_.index()];
}

double euclid_distance(const ConvexSet &set, const PrimalVector &x) {
    const Vec &v = x.coords();
    return std::visit(overloaded{
                          [&](const Halfspace &s) {
                              return std::max(0.0, s.a.coords().dot(v) - s.b) / s.a.coords().norm();
                          },
                          [&](const Hyperplane &s) {
                              return std::abs(s.a.coords().dot(v) - s.b) / s.a.coords().norm();
                          },
                          [&](const Box &s) { return clamp_distance(s, v); },
                          [&](const Ball2 &s) {
                              return std::max(0.0, (v - s.center.coords()).norm() - s.radius);
                          },
                          [&](const Simplex &s) { return (v - project_simplex(v, s.scale)).norm(); },
                          [&](const Intersection &s) {
                              double d = 0.0;
                              for (const auto &m : s.members) d = std::max(d, euclid_distance(m, x));
                              return d;
                          },
                      },
                      set.variant());
}

bool contains(const ConvexSet &set, const PrimalVector &x, double tol) {
    if (tol < 0.0) throw std::invalid_argument("contains: tolerance must be nonnegative");
    return euclid_distance(set, x) <= tol;
}

Vec project_simplex(const Vec &x, double scale) {
    const Eigen::Index n = x.size();
    std::vector<double> u(x.data(), x.data() + n);
    std::sort(u.begin(), u.end(), std::greater<>());
    double cumsum = 0.0, theta = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        cumsum += u[j];
        const double t = (cumsum - scale) / static_cast<double>(j + 1);
        if (u[j] - t > 0.0) theta = t;
    }
    return (x.array() - theta).cwiseMax(0.0).matrix();
}

PrimalVector euclid_project(const ConvexSet &set, const PrimalVector &x) {
    const Vec &v = x.coords();
    return std::visit(overloaded{
                          [&](const Halfspace &s) {
                              const Vec &a = s.a.coords();
                              const double viol = a.dot(v) - s.b;
                              if (viol <= 0.0) return x;
                              return PrimalVector(v - (viol / a.squaredNorm()) * a);
                          },
                          [&](const Hyperplane &s) {
                              const Vec &a = s.a.coords();
                              return PrimalVector(v - ((a.dot(v) - s.b) / a.squaredNorm()) * a);
                          },
                          [&](const Box &s) {
                              return PrimalVector(v.cwiseMax(s.lo.coords()).cwiseMin(s.hi.coords()));
                          },
                          [&](const Ball2 &s) {
                              const Vec d = v - s.center.coords();
                              const double r = d.norm();
                              if (r <= s.radius) return x;
                              return PrimalVector(s.center.coords() + (s.radius / r) * d);
                          },
                          [&](const Simplex &s) { return PrimalVector(project_simplex(v, s.scale)); },
                          [&](const Intersection &) -> PrimalVector {
                              throw std::invalid_argument(
                                  "euclid_project: intersections are handled by the feasibility solver");
                          },
                      },
                      set.variant());
}

SupportPoint linear_minimizer(const ConvexSet &set, const DualVector &g) {
    const Vec &gv = g.coords();
    const int n = set.dim();
    return std::visit(
        overloaded{
            [&](const Halfspace &s) {
                const Vec &a = s.a.coords();
                const Vec foot = (s.b / a.squaredNorm()) * a;
                if (gv.squaredNorm() == 0.0 || same_direction(-gv, a)) return SupportPoint{true, PrimalVector(foot)};
                return SupportPoint{false, PrimalVector(foot)};
            },
            [&](const Hyperplane &s) {
                const Vec &a = s.a.coords();
                const Vec foot = (s.b / a.squaredNorm()) * a;
                const bool ok = gv.squaredNorm() == 0.0 || same_direction(gv, a) || same_direction(-gv, a);
                return SupportPoint{ok, PrimalVector(foot)};
            },
            [&](const Box &s) {
                Vec p(n);
                for (int i = 0; i < n; ++i) p[i] = gv[i] > 0.0 ? s.lo[i] : (gv[i] < 0.0 ? s.hi[i] : s.lo[i]);
                return SupportPoint{true, PrimalVector(std::move(p))};
            },
            [&](const Ball2 &s) {
                const double gn = gv.norm();
                if (gn == 0.0) return SupportPoint{true, s.center};
                return SupportPoint{true, PrimalVector(s.center.coords() - (s.radius / gn) * gv)};
            },
            [&](const Simplex &s) {
                Eigen::Index k = 0;
                gv.minCoeff(&k);
                Vec p = Vec::Zero(n);
                p[k] = s.scale;
                return SupportPoint{true, PrimalVector(std::move(p))};
            },
            [&](const Intersection &) -> SupportPoint {
                throw std::invalid_argument("linear_minimizer: intersections are not supported");
            },
        },
        set.variant());
}

PrimalVector witness_point(const ConvexSet &set) {
    return std::visit(
        overloaded{
            [&](const Halfspace &s) { return PrimalVector((s.b / s.a.coords().squaredNorm()) * s.a.coords()); },
            [&](const Hyperplane &s) {
                return PrimalVector((s.b / s.a.coords().squaredNorm()) * s.a.coords());
            },
            [&](const Box &s) { return PrimalVector(0.5 * (s.lo.coords() + s.hi.coords())); },
            [&](const Ball2 &s) { return s.center; },
            [&](const Simplex &s) { return PrimalVector(Vec::Constant(s.dim, s.scale / s.dim)); },
            [&](const Intersection &s) {
                // Cyclic Euclidean projections from the first member's witness.
                PrimalVector x = witness_point(s.members.front());
                for (int sweep = 0; sweep < 100000; ++sweep) {
                    for (const auto &m : s.members) x = m.is_primitive() ? euclid_project(m, x) : witness_point(m);
                    if (euclid_distance(set, x) <= 1e-12) return x;
                }
                if (euclid_distance(set, x) > 1e-9)
                    throw std::invalid_argument("intersection appears to be empty");
                return x;
            },
        },
        set.variant());
}

std::vector<PrimalVector> sample_members(const ConvexSet &set, std::mt19937_64 &rng, int count,
                                         const PrimalVector &around, double radius) {
    std::vector<PrimalVector> out;
    if (count <= 0) return out;
    out.reserve(static_cast<std::size_t>(count));
    const int n = set.dim();
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    auto in_ball = [&]() {
        Vec d(n);
        for (int i = 0; i < n; ++i) d[i] = gauss(rng);
        const double r = radius * std::pow(unit(rng), 1.0 / n);
        const double dn = d.norm();
        if (dn > 0.0) d *= r / dn;
        return PrimalVector(around.coords() + d);
    };

    if (const auto *b = set.as<Box>()) {
        const long corners = n <= 20 ? (1L << n) : std::numeric_limits<long>::max();
        const long take = std::min<long>(corners, count / 2);
        for (long k = 0; k < take; ++k) {
            const long mask = corners <= count / 2 ? k : static_cast<long>(rng() % static_cast<unsigned long>(corners));
            Vec p(n);
            for (int i = 0; i < n; ++i) p[i] = (mask >> i) & 1L ? b->hi[i] : b->lo[i];
            out.emplace_back(std::move(p));
        }
        while (static_cast<int>(out.size()) < count) {
            Vec p(n);
            for (int i = 0; i < n; ++i) p[i] = b->lo[i] + unit(rng) * (b->hi[i] - b->lo[i]);
            // Every third draw is pushed onto a random face.
            if (out.size() % 3 == 0) {
                const int i = static_cast<int>(rng() % static_cast<unsigned long>(n));
                p[i] = unit(rng) < 0.5 ? b->lo[i] : b->hi[i];
            }
            out.emplace_back(std::move(p));
        }
        return out;
    }
    if (const auto *s = set.as<Simplex>()) {
        for (int k = 0; k < std::min(n, count / 2); ++k) {
            Vec p = Vec::Zero(n);
            p[k] = s->scale;
            out.emplace_back(std::move(p));
        }
        std::exponential_distribution<double> expo(1.0);
        while (static_cast<int>(out.size()) < count) {
            Vec p(n);
            for (int i = 0; i < n; ++i) p[i] = expo(rng);
            p *= s->scale / p.sum();
            out.emplace_back(std::move(p));
        }
        return out;
    }
    if (const auto *bl = set.as<Ball2>()) {
        while (static_cast<int>(out.size()) < count) {
            Vec d(n);
            for (int i = 0; i < n; ++i) d[i] = gauss(rng);
            d.normalize();
            const double r = out.size() % 2 == 0 ? bl->radius : bl->radius * std::pow(unit(rng), 1.0 / n);
            out.emplace_back(bl->center.coords() + r * d);
        }
        return out;
    }
    if (set.as<Halfspace>() || set.as<Hyperplane>()) {
        const Vec *a = set.as<Halfspace>() ? &set.as<Halfspace>()->a.coords() : &set.as<Hyperplane>()->a.coords();
        const double b = set.as<Halfspace>() ? set.as<Halfspace>()->b : set.as<Hyperplane>()->b;
        const bool plane = set.as<Hyperplane>() != nullptr;
        while (static_cast<int>(out.size()) < count) {
            PrimalVector y = in_ball();
            const double viol = a->dot(y.coords()) - b;
            if (plane || out.size() % 2 == 0 || viol > 0.0) {
                // Onto the bounding hyperplane.
                y = PrimalVector(y.coords() - (viol / a->squaredNorm()) * *a);
            }
            out.push_back(std::move(y));
        }
        return out;
    }
    throw std::invalid_argument("sample_members: intersections are not sampled directly");
}

ConvexSet perturb(const SpaceContext &ctx, const ConvexSet &set, double sigma) {
    if (!(sigma >= 0.0)) throw std::invalid_argument("perturb: sigma must be nonnegative");
    const double n = static_cast<double>(set.dim());
    if (const auto *h = set.as<Halfspace>())
        return ConvexSet::halfspace(h->a, h->b + sigma * dual_norm(ctx, h->a));
    if (const auto *h = set.as<Hyperplane>())
        return ConvexSet::hyperplane(h->a, h->b + sigma * dual_norm(ctx, h->a));
    if (const auto *b = set.as<Box>()) {
        const double d = sigma * std::pow(n, -1.0 / ctx.p());
        return ConvexSet::box(PrimalVector(b->lo.coords().array() - d), PrimalVector(b->hi.coords().array() + d));
    }
    if (const auto *b = set.as<Ball2>()) {
        if (!ctx.is_hilbert()) throw std::invalid_argument("perturb: ball perturbation is exact only for p = 2");
        return ConvexSet::ball2(b->center, b->radius + sigma);
    }
    throw std::invalid_argument("perturb: unsupported set type " + set.type_name());
}

double hausdorff_distance(const SpaceContext &ctx, const ConvexSet &a, const ConvexSet &b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("hausdorff_distance: dimension mismatch");
    if (const auto *ba = a.as<Box>()) {
        if (const auto *bb = b.as<Box>()) {
            // The l^p distance is separable in its p-th power, so the farthest
            // point of one box from the other is a corner.
            const int n = a.dim();
            Vec d1(n), d2(n);
            for (int i = 0; i < n; ++i) {
                d1[i] = std::max({0.0, bb->lo[i] - ba->lo[i], ba->hi[i] - bb->hi[i]});
                d2[i] = std::max({0.0, ba->lo[i] - bb->lo[i], bb->hi[i] - ba->hi[i]});
            }
            return std::max(lp_norm({d1.data(), static_cast<std::size_t>(n)}, ctx.p()),
                            lp_norm({d2.data(), static_cast<std::size_t>(n)}, ctx.p()));
        }
    }
    auto parallel_offset = [&](const DualVector &a1, double b1, const DualVector &a2, double b2) {
        if (!same_direction(a1.coords(), a2.coords()))
            throw std::invalid_argument("hausdorff_distance: normals are not parallel");
        const double s = a2.coords().norm() / a1.coords().norm();
        return std::abs(b2 / s - b1) / dual_norm(ctx, a1);
    };
    if (const auto *ha = a.as<Halfspace>())
        if (const auto *hb = b.as<Halfspace>()) return parallel_offset(ha->a, ha->b, hb->a, hb->b);
    if (const auto *ha = a.as<Hyperplane>())
        if (const auto *hb = b.as<Hyperplane>()) return parallel_offset(ha->a, ha->b, hb->a, hb->b);
    if (const auto *ba = a.as<Ball2>()) {
        if (const auto *bb = b.as<Ball2>()) {
            if (!ctx.is_hilbert()) throw std::invalid_argument("hausdorff_distance: balls supported only for p = 2");
            if (ba->center.coords() != bb->center.coords())
                throw std::invalid_argument("hausdorff_distance: balls must be concentric");
            return std::abs(ba->radius - bb->radius);
        }
    }
    throw std::invalid_argument("hausdorff_distance: unsupported pair " + a.type_name() + "/" + b.type_name());
}

} // namespace genproj
