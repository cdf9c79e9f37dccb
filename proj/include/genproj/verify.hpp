#pragma once

// Executable property suite: norm inequalities of l^p, strong-uniqueness
// estimates for the metric projection, the operator properties of P, Pi and
// pi, set-perturbation stability, and solver-level equivalences. Each check
// yields a CheckReport that stores both sides of the inequality.

#include "genproj/instance_generator.hpp"

#include <json.hpp>

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace genproj {

struct Tolerance {
    double abs;
    double rel;
    /// abs + rel * max(|lhs|, |rhs|, scale, 1)
    double allowed(double lhs, double rhs, double scale = 0.0) const;
};

/// Per-check tolerance; unknown ids get the default 1e-8 + 1e-8 relative.
Tolerance tolerance(std::string_view check_id);

struct CheckReport {
    std::string check_id;
    std::uint64_t instance_seed = 0;
    /// Worst sample. `slack` is oriented so that slack >= 0 means the
    /// inequality holds.
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;
    /// Tolerance granted to the worst sample.
    double allowed = 0.0;
    /// slack >= -allowed
    bool pass = true;
    /// Properties that are not expected to hold; a violation is evidence,
    /// not a failure.
    bool informational = false;
    int samples = 0;
    nlohmann::json context = nlohmann::json::object();
};

nlohmann::json to_json(const CheckReport &r);

/// Folds many samples of one inequality into a single report holding the
/// sample with the smallest margin slack + allowed tolerance.
class CheckAccumulator {
  public:
    CheckAccumulator(std::string check_id, std::uint64_t seed, bool informational = false);

    // `scale` is the magnitude of the terms that cancel inside lhs or rhs;
    // the relative tolerance applies to max(|lhs|, |rhs|, scale, 1).

    /// lhs <= rhs
    void add_le(double lhs, double rhs, double scale = 0.0);
    /// lhs >= rhs
    void add_ge(double lhs, double rhs, double scale = 0.0);
    /// lhs == rhs
    void add_eq(double lhs, double rhs, double scale = 0.0);

    int samples() const { return samples_; }
    const std::string &check_id() const { return id_; }
    CheckReport finish(nlohmann::json context) const;

  private:
    void add(double lhs, double rhs, double slack, double scale);

    std::string id_;
    std::uint64_t seed_;
    bool informational_;
    Tolerance tol_;
    int samples_ = 0;
    double margin_ = 0.0;
    double lhs_ = 0.0, rhs_ = 0.0, slack_ = 0.0, allowed_ = 0.0;
};

// Single-instance checks.

/// ||x + y||^p <= 2^{p-1}||x||^p + 2^{p-1}||y||^p - ||x - y||^p.
/// Throws std::invalid_argument for p < 2.
CheckReport check_clarkson(const SpaceContext &ctx, const PrimalVector &x, const PrimalVector &y,
                           std::uint64_t seed = 0);

/// 2||x||^2 + 2||y||^2 - ||x+y||^2 <= 4||x-y||^2 + C1 rho(||x-y||),
/// C1 = 2 max{L, (||x|| + ||y||)/2}.
CheckReport check_parallelogram_upper(const SpaceContext &ctx, const PrimalVector &x, const PrimalVector &y,
                                      std::uint64_t seed = 0);

/// 2||x||^2 + 2||y||^2 - ||x+y||^2 >= L^{-1} delta(||x-y|| / C2),
/// C2 = 2 max{1, sqrt((||x||^2 + ||y||^2)/2)}.
CheckReport check_parallelogram_lower(const SpaceContext &ctx, const PrimalVector &x, const PrimalVector &y,
                                      std::uint64_t seed = 0);

/// Strong-uniqueness estimates of xbar = P x over the samples xi, for the
/// regime of p.
std::vector<CheckReport> check_strong_uniqueness(const SpaceContext &ctx, const ConvexSet &set,
                                                 const PrimalVector &x, std::span<const PrimalVector> xi_samples,
                                                 std::uint64_t seed = 0, const InnerSolverConfig &inner = {});

/// One report per operator property of P, Pi, pi and the gauge projection:
/// single-point properties over (x, xi) for every xi sample, pair
/// properties over the given pairs. Hilbert-only properties of P are
/// contractual at p = 2 and informational otherwise.
std::vector<CheckReport> check_operator_properties(const SpaceContext &ctx, const ConvexSet &set,
                                                   const PrimalVector &x, std::span<const PrimalVector> xi_samples,
                                                   std::span<const std::pair<PrimalVector, PrimalVector>> pairs,
                                                   std::uint64_t seed = 0, const InnerSolverConfig &inner = {});

// Suite.

enum class CheckFamily { inequalities, projections, stability, feasibility, variational };

std::string to_string(CheckFamily f);
CheckFamily check_family_from_string(std::string_view s);
std::vector<CheckFamily> all_check_families();

struct SuiteConfig {
    GeneratorConfig generator{};
    std::vector<double> ps{1.5, 2.0, 3.0, 4.0};
    std::vector<CheckFamily> families = all_check_families();

    /// inequalities: units x pairs per unit, per p
    int inequality_units = 100;
    int inequality_pairs = 100;
    /// projections: instances per p, xi samples and point pairs per instance
    int projection_instances = 30;
    int projection_samples = 1000;
    int projection_pairs = 34;
    /// stability: box instances per p, points per instance
    int stability_instances = 20;
    int stability_points = 10;
    std::vector<double> stability_sigmas{1e-3, 1e-2, 1e-1};
    /// feasibility and variational: instances per p
    int feasibility_instances = 20;
    int feasibility_max_sweeps = 10000;
    int vi_instances = 20;
    int vi_max_iter = 20000;

    bool parallel = true;
    InnerSolverConfig inner{};

    void validate() const;
};

struct SuiteSummary {
    int total = 0;
    int passed = 0;
    int failed = 0;        ///< contractual reports with pass == false
    int informational = 0; ///< informational reports
};

struct SuiteResult {
    std::vector<CheckReport> reports; ///< sorted by (check_id, instance_seed)
    SuiteSummary summary;
};

/// Runs the configured families; work units fan out over threads when
/// cfg.parallel is set. Output is identical either way.
SuiteResult run_suite(const SuiteConfig &cfg);
SuiteResult run_suite_serial(const SuiteConfig &cfg);
SuiteResult run_suite_parallel(const SuiteConfig &cfg);

SuiteSummary summarize(std::span<const CheckReport> reports);
nlohmann::json to_json(const SuiteSummary &s);
void write_reports_jsonl(std::ostream &os, std::span<const CheckReport> reports);

} // namespace genproj
