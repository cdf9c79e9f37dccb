#include "genproj/projections.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace genproj;

namespace {

Vec random_vec(std::mt19937_64 &rng, int n, double scale = 1.0) {
    std::normal_distribution<double> g(0.0, scale);
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = g(rng);
    return v;
}

const ConvexSet unit_box = ConvexSet::box(PrimalVector{0, 0}, PrimalVector{1, 1});

bool in_unit_box(const Eigen::VectorXd &s) { return s.minCoeff() >= 0.0 && s.maxCoeff() <= 1.0; }

std::vector<ConvexSet> primitive_sets(int n) {
    Vec a = Vec::LinSpaced(n, 1.0, -0.5);
    Vec lo = Vec::LinSpaced(n, -1.0, 0.0), hi = Vec::LinSpaced(n, 0.5, 2.0);
    return {ConvexSet::halfspace(DualVector(a), 0.4), ConvexSet::hyperplane(DualVector(a), -0.3),
            ConvexSet::box(PrimalVector(lo), PrimalVector(hi)), ConvexSet::simplex(n, 1.5),
            ConvexSet::ball2(PrimalVector(Vec::Constant(n, 0.25)), 1.2)};
}

double dist(const PrimalVector &a, const PrimalVector &b) { return (a.coords() - b.coords()).norm(); }

} // namespace

TEST_SUITE("projections") {

TEST_CASE("members are fixed by every projection") {
    std::mt19937_64 rng(1);
    for (double p : {1.5, 2.0, 3.0, 4.0}) {
        const SpaceContext ctx(3, p);
        for (const ConvexSet &set : primitive_sets(3)) {
            for (const auto &xi : sample_members(set, rng, 5, witness_point(set), 2.0)) {
                const ProjectionResult m = metric_project(ctx, set, xi);
                CHECK(dist(m.point, xi) <= 1e-9);
                CHECK(m.objective <= 1e-15);
                CHECK(dist(generalized_project_Pi(ctx, set, xi).point, xi) <= 1e-9);
                CHECK(dist(generalized_project_pi(ctx, set, duality_map(ctx, xi)).point, xi) <= 1e-8);
                CHECK(composition_identity_residual(ctx, set, xi) <= 1e-8);
            }
        }
    }
}

TEST_CASE("hilbert box clamp") {
    const SpaceContext ctx(2, 2.0);
    const ProjectionTriple t = project_all(ctx, unit_box, PrimalVector{2, 0.5});
    for (const ProjectionResult *r : {&t.metric, &t.Pi, &t.pi_of_Jx}) {
        CHECK(r->point[0] == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(r->point[1] == doctest::Approx(0.5).epsilon(1e-9));
        CHECK(r->converged);
    }
}

TEST_CASE("p = 3 box projections agree with the grid oracle") {
    const double p = 3.0;
    const SpaceContext ctx(2, p);
    const PrimalVector x{2, 0.5};
    const Eigen::Vector2d lo(0, 0), hi(1, 1);
    const Vec member = Vec::Constant(2, 0.5);
    const Eigen::Vector2d gm = oracle::grid_projection(oracle::Kind::metric, x.coords(), p, in_unit_box, member, lo, hi, 1e-3);
    const Eigen::Vector2d gv = oracle::grid_projection(oracle::Kind::v2, x.coords(), p, in_unit_box, member, lo, hi, 1e-3);
    CHECK((metric_project(ctx, unit_box, x).point.coords() - Vec(gm)).cwiseAbs().maxCoeff() <= 2e-3);
    CHECK((generalized_project_Pi(ctx, unit_box, x).point.coords() - Vec(gv)).cwiseAbs().maxCoeff() <= 2e-3);

    const DualVector phi{1.2, -0.4};
    const Eigen::Vector2d grid_pi = oracle::grid_projection(oracle::Kind::v4, phi.coords(), p, in_unit_box, member, lo, hi, 1e-3);
    CHECK((generalized_project_pi(ctx, unit_box, phi).point.coords() - Vec(grid_pi)).cwiseAbs().maxCoeff() <= 2e-3);
}

TEST_CASE("halfspace projections agree with the grid oracle") {
    std::mt19937_64 rng(3);
    for (double p : {1.5, 3.0, 4.0}) {
        const SpaceContext ctx(2, p);
        for (int k = 0; k < 3; ++k) {
            const Vec a = random_vec(rng, 2);
            const double b = random_vec(rng, 1)[0];
            const ConvexSet hs = ConvexSet::halfspace(DualVector(a), b);
            auto feasible = [&](const Eigen::VectorXd &s) { return a.dot(s) <= b; };
            const Vec member = euclid_project(hs, PrimalVector::zero(2)).coords() - 1e-9 * a;
            const Eigen::Vector2d inf = Eigen::Vector2d::Constant(std::numeric_limits<double>::infinity());
            const std::vector<oracle::Line> edge{{Eigen::Vector2d(a), b}};
            const PrimalVector x(Vec(member + a.normalized() * 1.5 + random_vec(rng, 2)));
            CAPTURE(p);
            CAPTURE(x.coords().transpose());
            const Eigen::Vector2d gm = oracle::grid_projection(oracle::Kind::metric, x.coords(), p, feasible, member, -inf, inf, 1e-3, edge);
            const Eigen::Vector2d gv = oracle::grid_projection(oracle::Kind::v2, x.coords(), p, feasible, member, -inf, inf, 1e-3, edge);
            const DualVector jx = duality_map(ctx, x);
            const Eigen::Vector2d grid_pi = oracle::grid_projection(oracle::Kind::v4, jx.coords(), p, feasible, member, -inf, inf, 1e-3, edge);
            const ProjectionTriple t = project_all(ctx, hs, x);
            CHECK((t.metric.point.coords() - Vec(gm)).cwiseAbs().maxCoeff() <= 2e-3);
            CHECK((t.Pi.point.coords() - Vec(gv)).cwiseAbs().maxCoeff() <= 2e-3);
            CHECK((t.pi_of_Jx.point.coords() - Vec(grid_pi)).cwiseAbs().maxCoeff() <= 2e-3);
        }
    }
}

TEST_CASE("euclidean ball projections agree with the grid oracle") {
    const double p = 3.0;
    const SpaceContext ctx(2, p);
    const ConvexSet ball = ConvexSet::ball2(PrimalVector{0.5, 0.5}, 0.5);
    auto feasible = [](const Eigen::VectorXd &s) { return (s - Vec::Constant(2, 0.5)).norm() <= 0.5; };
    const PrimalVector x{2.0, -0.3};
    const ProjectionTriple t = project_all(ctx, ball, x);
    const Vec member = Vec::Constant(2, 0.5);
    const Eigen::Vector2d lo(0, 0), hi(1, 1);
    CHECK((t.metric.point.coords() - Vec(oracle::grid_projection(oracle::Kind::metric, x.coords(), p, feasible, member, lo, hi, 1e-3))).cwiseAbs().maxCoeff() <= 2e-3);
    CHECK((t.Pi.point.coords() - Vec(oracle::grid_projection(oracle::Kind::v2, x.coords(), p, feasible, member, lo, hi, 1e-3))).cwiseAbs().maxCoeff() <= 2e-3);
}

TEST_CASE("hilbert collapse of the three projections") {
    std::mt19937_64 rng(5);
    const SpaceContext ctx(4, 2.0);
    for (const ConvexSet &set : primitive_sets(4)) {
        for (int k = 0; k < 20; ++k) {
            const PrimalVector x(random_vec(rng, 4, 3.0));
            const ProjectionTriple t = project_all(ctx, set, x);
            CHECK(dist(t.metric.point, t.Pi.point) <= 1e-6);
            CHECK(dist(t.metric.point, t.pi_of_Jx.point) <= 1e-6);
            CHECK(dist(t.metric.point, euclid_project(set, x)) <= 1e-6);
            const DualVector phi(random_vec(rng, 4, 3.0));
            CHECK(dist(generalized_project_pi(ctx, set, phi).point, euclid_project(set, PrimalVector(phi.coords()))) <= 1e-6);
            CHECK(composition_identity_residual(ctx, set, x) <= 1e-6);
            CHECK(dist(gauge_project(ctx, set, x).point, t.metric.point) <= 1e-6);
        }
    }
}

TEST_CASE("composition identity at p = 3") {
    std::mt19937_64 rng(7);
    const auto sets = primitive_sets(3);
    for (int k = 0; k < 100; ++k) {
        const SpaceContext ctx(3, 3.0);
        const ConvexSet &set = sets[k % sets.size()];
        CHECK(composition_identity_residual(ctx, set, PrimalVector(random_vec(rng, 3, 3.0))) <= 1e-5);
    }
}

TEST_CASE("postconditions on membership and optimality") {
    std::mt19937_64 rng(9);
    InnerSolverConfig cfg;
    for (double p : {1.5, 2.0, 3.0, 4.0}) {
        const SpaceContext ctx(3, p);
        for (const ConvexSet &set : primitive_sets(3)) {
            for (int k = 0; k < 10; ++k) {
                const PrimalVector x(random_vec(rng, 3, 3.0));
                const ProjectionTriple t = project_all(ctx, set, x, cfg);
                for (const ProjectionResult *r : {&t.metric, &t.Pi, &t.pi_of_Jx}) {
                    CHECK(contains(set, r->point, 1e-7));
                    CHECK(r->converged);
                    CHECK(r->kkt_residual <= cfg.tol);
                }
                CHECK(t.metric.objective == doctest::Approx(std::pow(norm(ctx, x - t.metric.point), 2)).epsilon(1e-9));
                CHECK(t.Pi.objective == doctest::Approx(v2(ctx, x, t.Pi.point).value()).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("projected gradient agrees with the optimality system solve") {
    std::mt19937_64 rng(11);
    InnerSolverConfig pg;
    pg.method = InnerMethod::projected_gradient;
    pg.tol = 1e-10;
    for (double p : {1.5, 3.0}) {
        const SpaceContext ctx(3, p);
        const auto sets = primitive_sets(3);
        for (std::size_t s = 0; s + 1 < sets.size(); ++s) {
            for (int k = 0; k < 3; ++k) {
                const PrimalVector x(random_vec(rng, 3, 2.0));
                const ProjectionResult a = generalized_project_Pi(ctx, sets[s], x);
                const ProjectionResult b = generalized_project_Pi(ctx, sets[s], x, pg);
                CHECK(b.objective >= a.objective - 1e-9);
                CHECK(dist(a.point, b.point) <= 1e-3);
                const ProjectionResult c = metric_project(ctx, sets[s], x);
                const ProjectionResult d = metric_project(ctx, sets[s], x, pg);
                CHECK(d.objective >= c.objective - 1e-9);
                CHECK(dist(c.point, d.point) <= 1e-3);
            }
        }
    }
}

TEST_CASE("projections minimize their functionals over sampled members") {
    std::mt19937_64 rng(13);
    for (double p : {1.5, 3.0, 4.0}) {
        const SpaceContext ctx(3, p);
        for (const ConvexSet &set : primitive_sets(3)) {
            const PrimalVector x(random_vec(rng, 3, 3.0));
            const ProjectionTriple t = project_all(ctx, set, x);
            const DualVector jx = duality_map(ctx, x);
            for (const auto &xi : sample_members(set, rng, 200, t.metric.point, 2.0)) {
                CHECK(oracle::metric_objective(x.coords(), xi.coords(), p) >= t.metric.objective - 1e-9);
                CHECK(oracle::v2_objective(x.coords(), xi.coords(), p) >= t.Pi.objective - 1e-9);
                CHECK(oracle::v4_objective(jx.coords(), xi.coords(), p) >= t.pi_of_Jx.objective - 1e-9);
            }
        }
    }
}

TEST_CASE("characterization examples") {
    const SpaceContext h(2, 2.0);
    const PrimalVector x{2, 0.5};
    const ProjectionTriple t = project_all(h, unit_box, x);
    const std::vector<PrimalVector> at_projection{t.metric.point};
    CHECK(std::abs(characterization_residuals(h, x, t, at_projection).P_variational) <= 1e-12);
    const std::vector<PrimalVector> origin{PrimalVector{0, 0}};
    CHECK(characterization_residuals(h, x, t, origin).P_distance_strong == doctest::Approx(1.0));
    CHECK(characterization_residuals(h, x, t, {}).samples == 0);

    std::mt19937_64 rng(17);
    const SpaceContext ctx(3, 3.0);
    for (const ConvexSet &set : primitive_sets(3)) {
        const PrimalVector y(random_vec(rng, 3, 3.0));
        const ProjectionTriple ty = project_all(ctx, set, y);
        const auto xis = sample_members(set, rng, 1000, ty.metric.point, 3.0);
        const CharacterizationReport r = characterization_residuals(ctx, y, ty, xis);
        CHECK(r.samples == 1000);
        for (double s : {r.P_variational, r.P_distance, r.P_distance_strong, r.Pi_variational, r.Pi_cross, r.Pi_distance, r.pi_variational, r.pi_cross, r.pi_distance}) CHECK(s >= -1e-6);
    }
}

TEST_CASE("invalid inputs are rejected") {
    const SpaceContext ctx(2, 3.0);
    const ConvexSet in = ConvexSet::intersection({unit_box, ConvexSet::halfspace(DualVector{1, 1}, 1.0)});
    CHECK_THROWS_AS(metric_project(ctx, in, PrimalVector{2, 2}), std::invalid_argument);
    CHECK_THROWS_AS(metric_project(ctx, unit_box, PrimalVector{1, 2, 3}), std::invalid_argument);
    InnerSolverConfig bad;
    bad.tol = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = {};
    bad.step_rule = Backtracking{1.5, 1e-4};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = {};
    bad.step_rule = FixedStep{-1.0};
    CHECK_THROWS_AS(generalized_project_Pi(ctx, unit_box, PrimalVector{2, 2}, bad), std::invalid_argument);
}

} // TEST_SUITE
