// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Tolerances are pinned here, not taken from the library.

#include "genproj/verify.hpp"

#include "oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>

using namespace genproj;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

Vec gaussian(std::mt19937_64 &rng, int n, double scale = 1.0) {
    std::normal_distribution<double> g(0.0, scale);
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = g(rng);
    return v;
}

double max_abs(const Vec &v) { return v.cwiseAbs().maxCoeff(); }

const std::vector<double> kPs{1.5, 2.0, 3.0, 4.0};
const InstanceGenerator kGen(GeneratorConfig{});

// Duality identities on 10^4 seeded vectors, measured against extended
// precision norms.
Outcome duality_identities() {
    double pairing_err = 0.0, norm_err = 0.0, roundtrip_err = 0.0;
    int count = 0;
    for (double p : kPs) {
        std::mt19937_64 rng(derive_seed(42, 1, static_cast<std::uint64_t>(p * 10)));
        for (int k = 0; k < 2500; ++k, ++count) {
            const int n = 1 + k % 8;
            const SpaceContext ctx(n, p);
            const PrimalVector x(kGen.vector(rng, n));
            const double nx = static_cast<double>(oracle::lp_norm(x.coords(), p));
            if (nx == 0.0) continue;
            const DualVector jx = duality_map(ctx, x);
            pairing_err = std::max(pairing_err, std::abs(static_cast<double>(oracle::dot(jx.coords(), x.coords())) - nx * nx) / (nx * nx));
            norm_err = std::max(norm_err, std::abs(static_cast<double>(oracle::lp_norm(jx.coords(), ctx.q())) - nx) / nx);
            roundtrip_err = std::max(roundtrip_err, static_cast<double>(oracle::lp_norm(duality_map_star(ctx, jx).coords() - x.coords(), p)) / nx);
        }
    }
    const bool pass = pairing_err <= 1e-9 && norm_err <= 1e-9 && roundtrip_err <= 1e-8;
    return {pass, std::to_string(count) + " vectors; pairing " + fmt(pairing_err) + ", dual norm " + fmt(norm_err) +
                      ", roundtrip " + fmt(roundtrip_err)};
}

// P x, Pi x and pi(Jx) coincide at p = 2.
Outcome hilbert_collapse() {
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        std::mt19937_64 rng(derive_seed(42, 2, k));
        const int n = kGen.dimension(rng);
        const SpaceContext ctx(n, 2.0);
        const ConvexSet set = k % 2 ? kGen.box(rng, n) : kGen.halfspace(rng, n);
        const PrimalVector x(Vec(witness_point(set).coords() + gaussian(rng, n, 4.0)));
        const ProjectionTriple t = project_all(ctx, set, x);
        worst = std::max({worst, norm(ctx, t.metric.point - t.Pi.point), norm(ctx, t.metric.point - t.pi_of_Jx.point),
                          norm(ctx, t.Pi.point - t.pi_of_Jx.point)});
    }
    return {worst <= 1e-6, "100 instances; max pairwise distance " + fmt(worst)};
}

// The three projections against grid minimization of their defining
// functionals, n = 2, resolution 1e-3.
Outcome grid_oracle_equivalence() {
    double worst = 0.0;
    int instances = 0;
    const double inf = std::numeric_limits<double>::infinity();
    for (double p : kPs) {
        const SpaceContext ctx(2, p);
        for (int k = 0; k < 30; ++k, ++instances) {
            std::mt19937_64 rng(derive_seed(42, 3, static_cast<std::uint64_t>(p * 100) * 1000 + k));
            const ConvexSet set = k % 2 ? kGen.box(rng, 2) : kGen.halfspace(rng, 2);
            std::function<bool(const Eigen::VectorXd &)> feasible;
            Eigen::Vector2d lo = Eigen::Vector2d::Constant(-inf), hi = Eigen::Vector2d::Constant(inf);
            std::vector<oracle::Line> edges;
            if (const Box *b = set.as<Box>()) {
                lo = b->lo.coords();
                hi = b->hi.coords();
                feasible = [lo, hi](const Eigen::VectorXd &s) {
                    return (s.array() >= lo.array()).all() && (s.array() <= hi.array()).all();
                };
            } else {
                const Halfspace *h = set.as<Halfspace>();
                const Vec a = h->a.coords();
                const double rhs = h->b;
                feasible = [a, rhs](const Eigen::VectorXd &s) { return a.dot(s) <= rhs; };
                edges.push_back({Eigen::Vector2d(a), rhs});
            }
            const Vec member = witness_point(set).coords();
            const PrimalVector x(Vec(member + gaussian(rng, 2, 2.0)));
            const ProjectionTriple t = project_all(ctx, set, x);
            const Vec jx = duality_map(ctx, x).coords();
            const Vec gm = oracle::grid_projection(oracle::Kind::metric, x.coords(), p, feasible, member, lo, hi, 1e-3, edges);
            const Vec gv = oracle::grid_projection(oracle::Kind::v2, x.coords(), p, feasible, member, lo, hi, 1e-3, edges);
            const Vec grid_pi = oracle::grid_projection(oracle::Kind::v4, jx, p, feasible, member, lo, hi, 1e-3, edges);
            worst = std::max({worst, max_abs(t.metric.point.coords() - gm), max_abs(t.Pi.point.coords() - gv),
                              max_abs(t.pi_of_Jx.point.coords() - grid_pi)});
        }
    }
    return {worst <= 2e-3, std::to_string(instances) + " instances; max coordinate gap " + fmt(worst)};
}

// Variational characterizations over 10^3 sampled members per instance.
Outcome characterization_residuals() {
    double worst = std::numeric_limits<double>::infinity();
    int instances = 0;
    for (double p : kPs) {
        for (int k = 0; k < 30; ++k, ++instances) {
            std::mt19937_64 rng(derive_seed(42, 4, static_cast<std::uint64_t>(p * 100) * 1000 + k));
            const int n = kGen.dimension(rng);
            const SpaceContext ctx(n, p);
            const ConvexSet set = kGen.set(rng, n);
            const PrimalVector x(Vec(witness_point(set).coords() + gaussian(rng, n, 4.0)));
            const ProjectionTriple t = project_all(ctx, set, x);
            const double radius = std::max(1.0, 2.0 * norm(ctx, x - t.metric.point));
            const auto xis = sample_members(set, rng, 1000, t.metric.point, radius);
            const CharacterizationReport r = characterization_residuals(ctx, x, t, xis);
            worst = std::min({worst, r.P_distance_strong, r.P_variational, r.Pi_variational, r.pi_variational, r.pi_cross});
        }
    }
    return {worst >= -1e-6, std::to_string(instances) + " instances x 1000 samples; min slack " + fmt(worst)};
}

// Strong-uniqueness estimates on box instances.
Outcome strong_uniqueness() {
    double worst = std::numeric_limits<double>::infinity();
    std::set<std::string> ids;
    int samples = 0;
    for (double p : {1.5, 3.0}) {
        for (int k = 0; k < 30; ++k) {
            std::mt19937_64 rng(derive_seed(42, 5, static_cast<std::uint64_t>(p * 100) * 1000 + k));
            const int n = kGen.dimension(rng);
            const SpaceContext ctx(n, p);
            const ConvexSet box = kGen.box(rng, n);
            const PrimalVector x(Vec(witness_point(box).coords() + gaussian(rng, n, 3.0)));
            const PrimalVector xbar = metric_project(ctx, box, x).point;
            const auto xis = sample_members(box, rng, 1000, xbar, std::max(1.0, 2.0 * norm(ctx, x - xbar)));
            for (const CheckReport &r : check_strong_uniqueness(ctx, box, x, xis)) {
                const bool wanted = (p == 1.5 && r.check_id == "su.square") ||
                                    (p == 3.0 && (r.check_id == "su.power" || r.check_id == "su.power_higher_order"));
                if (!wanted) continue;
                ids.insert(r.check_id);
                samples += r.samples;
                worst = std::min(worst, r.slack);
            }
        }
    }
    const bool pass = ids.size() == 3 && worst >= -1e-8;
    return {pass, std::to_string(samples) + " samples over " + std::to_string(ids.size()) + " estimates; min slack " + fmt(worst)};
}

bool starts_with(const std::string &s, const std::string &prefix) { return s.rfind(prefix, 0) == 0; }

// Norm inequalities and V2 bounds in the default suite.
Outcome inequality_corpus(const SuiteResult &suite) {
    int reports = 0, failed = 0, samples = 0;
    for (const CheckReport &r : suite.reports) {
        if (!(starts_with(r.check_id, "ineq.") || starts_with(r.check_id, "lyapunov.")) || r.informational) continue;
        ++reports;
        samples += r.samples;
        if (!r.pass) ++failed;
    }
    return {reports > 0 && failed == 0,
            std::to_string(reports) + " reports, " + std::to_string(samples) + " samples, " + std::to_string(failed) + " failed"};
}

// Generalized successive projections onto three halfspaces.
Outcome feasibility_convergence() {
    double increase = 0.0, displacement = 0.0, distance = 0.0;
    int runs = 0;
    bool all_ran = true;
    for (double p : kPs) {
        for (int k = 0; k < 20; ++k, ++runs) {
            std::mt19937_64 rng(derive_seed(42, 7, static_cast<std::uint64_t>(p * 100) * 1000 + k));
            const int n = kGen.dimension(rng);
            const FeasibilityInstance in = kGen.feasibility_instance(rng(), p, n, 3);
            SolverConfig cfg;
            cfg.max_iter = 10000;
            cfg.stop_tol = 1e-8;
            const Trace tr = successive_projections(in.ctx, in.sets, in.x0, ProjectionMode::generalized, cfg, in.xi_star);
            const FeasibilityDiagnostics g = feasibility_diagnostics(in.ctx, tr, in.xi_star, 1e-6, 1e-8);
            all_ran = all_ran && !tr.diverged && tr.inner_failures == 0;
            increase = std::max(increase, g.max_v2_increase);
            displacement = std::max(displacement, g.final_displacement);
            for (const ConvexSet &s : in.sets) distance = std::max(distance, euclid_distance(s, tr.solution));
        }
    }
    const bool pass = all_ran && increase <= 1e-8 && displacement <= 1e-6 && distance <= 1e-6;
    return {pass, std::to_string(runs) + " runs; max V2 increase " + fmt(increase) + ", final displacement " +
                      fmt(displacement) + ", set distance " + fmt(distance)};
}

struct SolvedVI {
    VIInstance in;
    PrimalVector x;
};

std::vector<SolvedVI> solve_vi_instances() {
    std::vector<SolvedVI> out;
    for (double p : {1.5, 2.0, 3.0}) {
        for (int k = 0; k < 20; ++k) {
            std::mt19937_64 rng(derive_seed(42, 8, static_cast<std::uint64_t>(p * 100) * 1000 + k));
            const int n = kGen.dimension(rng);
            VIInstance in = kGen.vi_instance(rng(), p, n);
            SolverConfig cfg;
            cfg.alpha = in.alpha;
            cfg.max_iter = 20000;
            cfg.stop_tol = 1e-13;
            const Trace tr = vi_solve_generalized(in.ctx, in.set, in.A, in.f, in.x0, cfg);
            out.push_back({std::move(in), tr.solution});
        }
    }
    return out;
}

// VI solutions: fixed-point residual, sampled VI slack, and the active-face
// oracle for box-constrained affine problems.
Outcome vi_equivalence(const std::vector<SolvedVI> &solved) {
    double fp = 0.0, slack = std::numeric_limits<double>::infinity(), oracle_gap = 0.0;
    for (const SolvedVI &s : solved) {
        const VIInstance &in = s.in;
        fp = std::max(fp, fixed_point_residual_generalized(in.ctx, in.set, in.A, in.f, s.x, in.alpha));
        slack = std::min(slack, vi_residual(in.ctx, in.set, in.A, in.f, s.x, 1000, 42));
        const Box &b = *in.set.as<Box>();
        const Vec ref = oracle::box_vi_solution(in.A.matrix(), in.f.coords() - in.A.offset().coords(), b.lo.coords(), b.hi.coords());
        oracle_gap = std::max(oracle_gap, max_abs(s.x.coords() - ref));
    }
    const bool pass = fp <= 1e-6 && slack >= -1e-6 && oracle_gap <= 1e-6;
    return {pass, std::to_string(solved.size()) + " instances; fixed-point residual " + fmt(fp) + ", VI slack " + fmt(slack) +
                      ", face oracle gap " + fmt(oracle_gap)};
}

// Wiener-Hopf reconstruction from the solved VIs.
Outcome wiener_hopf_equivalence(const std::vector<SolvedVI> &solved) {
    double residual = 0.0, recon = 0.0, cross = 0.0;
    for (const SolvedVI &s : solved) {
        const VIInstance &in = s.in;
        const SpaceContext &ctx = in.ctx;
        const DualVector g = in.A.apply(s.x) - in.f;
        const DualVector z = duality_map(ctx, s.x) - in.alpha * g;
        residual = std::max(residual, wiener_hopf_residual_generalized(ctx, in.set, in.A, in.f, z, in.alpha));
        recon = std::max(recon, norm(ctx, generalized_project_pi(ctx, in.set, z).point - s.x));
        const PrimalVector lhs = metric_project(ctx, in.set, s.x - in.alpha * duality_map_star(ctx, g)).point;
        const PrimalVector rhs = generalized_project_Pi(ctx, in.set, duality_map_star(ctx, z)).point;
        cross = std::max(cross, norm(ctx, lhs - rhs));
    }
    const bool pass = residual <= 1e-6 && recon <= 1e-6 && cross <= 1e-5;
    return {pass, "residual " + fmt(residual) + ", reconstruction " + fmt(recon) + ", cross-operator " + fmt(cross)};
}

// Monotonicity and accretivity of the projections over random pairs.
Outcome monotonicity_accretivity(const SuiteResult &suite) {
    const std::set<std::string> ids{"Pi.d_accretive",      "pi.monotone",           "Pi.strongly_accretive",
                                    "pi.strongly_monotone", "P.accretive_complement", "Pi.accretive_complement",
                                    "pi.accretive_complement"};
    double worst = std::numeric_limits<double>::infinity();
    std::map<double, int> pairs_per_p;
    std::set<std::string> seen;
    for (const CheckReport &r : suite.reports) {
        if (!ids.count(r.check_id)) continue;
        seen.insert(r.check_id);
        worst = std::min(worst, r.slack);
        if (r.check_id == "pi.monotone") pairs_per_p[r.context.value("p", 0.0)] += r.samples;
    }
    int min_pairs = std::numeric_limits<int>::max();
    for (double p : kPs) min_pairs = std::min(min_pairs, pairs_per_p[p]);
    const bool pass = seen.size() == ids.size() && min_pairs >= 1000 && worst >= -1e-8;
    return {pass, std::to_string(seen.size()) + " properties, >= " + std::to_string(min_pairs) + " pairs per p; min slack " + fmt(worst)};
}

// Stability of Pi under box inflation by an exact Hausdorff distance.
Outcome perturbation_stability(const SuiteResult &suite) {
    double worst = std::numeric_limits<double>::infinity(), hausdorff = 0.0;
    int samples = 0;
    for (const CheckReport &r : suite.reports) {
        if (r.check_id == "stability.perturbation") {
            worst = std::min(worst, r.slack);
            samples += r.samples;
        }
        if (r.check_id == "stability.hausdorff") hausdorff = std::max(hausdorff, std::abs(r.slack));
    }
    const bool pass = samples > 0 && worst >= -1e-6 && hausdorff <= 1e-12;
    return {pass, std::to_string(samples) + " samples; min slack " + fmt(worst) + ", Hausdorff error " + fmt(hausdorff)};
}

std::string report_text(const SuiteResult &r) {
    std::ostringstream os;
    write_reports_jsonl(os, r.reports);
    return os.str();
}

// Repeated full-suite runs, serial and parallel, write identical files.
Outcome determinism(const SuiteResult &first, const SuiteConfig &cfg) {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "genproj_acceptance";
    fs::create_directories(dir);
    const std::vector<std::string> texts{report_text(first), report_text(run_suite_parallel(cfg)), report_text(run_suite_serial(cfg))};
    std::vector<std::string> files;
    for (std::size_t k = 0; k < texts.size(); ++k) {
        const fs::path p = dir / ("report_" + std::to_string(k) + ".jsonl");
        std::ofstream(p, std::ios::binary) << texts[k];
        std::ifstream in(p, std::ios::binary);
        std::ostringstream os;
        os << in.rdbuf();
        files.push_back(os.str());
    }
    const bool pass = !files[0].empty() && files[0] == files[1] && files[0] == files[2];
    return {pass, "3 runs (2 parallel, 1 serial), " + std::to_string(files[0].size()) + " bytes each"};
}

} // namespace

int main() {
    int failures = 0;
    auto report = [&](int id, const char *name, const Outcome &o) {
        std::cout << (o.pass ? "PASS" : "FAIL") << "  " << id << " " << name << ": " << o.detail << std::endl;
        if (!o.pass) ++failures;
    };

    const SuiteConfig cfg;
    const auto t0 = std::chrono::steady_clock::now();
    const SuiteResult suite = run_suite(cfg);
    const double suite_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    report(1, "duality_identities", duality_identities());
    report(2, "hilbert_collapse", hilbert_collapse());
    report(3, "grid_oracle_equivalence", grid_oracle_equivalence());
    report(4, "characterization_residuals", characterization_residuals());
    report(5, "strong_uniqueness", strong_uniqueness());
    report(6, "inequality_corpus", inequality_corpus(suite));
    report(7, "feasibility_convergence", feasibility_convergence());
    const std::vector<SolvedVI> solved = solve_vi_instances();
    report(8, "vi_equivalence", vi_equivalence(solved));
    report(9, "wiener_hopf_equivalence", wiener_hopf_equivalence(solved));
    report(10, "monotonicity_accretivity", monotonicity_accretivity(suite));
    report(11, "perturbation_stability", perturbation_stability(suite));
    report(12, "determinism", determinism(suite, cfg));

    std::cout << "suite: " << suite.summary.total << " reports, " << suite.summary.failed << " contractual failures, "
              << suite.summary.informational << " informational, " << fmt(suite_seconds) << " s (budget 300 s)" << std::endl;
    if (suite.summary.failed != 0 || suite_seconds > 300.0) ++failures;
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " failing") << std::endl;
    return failures == 0 ? 0 : 1;
}
