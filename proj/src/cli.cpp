#include "genproj/cli.hpp"

#include "genproj/trace_io.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace genproj {

using nlohmann::json;
namespace fs = std::filesystem;

std::string default_out_dir() {
    const char *env = std::getenv("OUT_DIR");
    return env && *env ? std::string(env) : std::string("out");
}

namespace {

void write_file(const fs::path &path, const std::string &content) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << content;
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

void write_json(const fs::path &path, const json &j) { write_file(path, j.dump(2) + "\n"); }

void write_trace(const fs::path &dir, const Trace &trace) {
    std::ostringstream csv;
    write_trace_csv(csv, trace);
    write_file(dir / "trace.csv", csv.str());
    write_json(dir / "trace.json", trace_to_json(trace));
}

json projection_json(const ProjectionResult &r) {
    return {{"point", vector_to_json(r.point.coords())},
            {"objective", r.objective},
            {"kkt_residual", r.kkt_residual},
            {"inner_iterations", r.inner_iterations},
            {"converged", r.converged}};
}

json spec_json(const ProblemSpec &spec) {
    return {{"task", to_string(spec.task)},
            {"n", spec.n},
            {"p", spec.p},
            {"mode", to_string(spec.mode)},
            {"seed", spec.solver.seed},
            {"alpha", spec.solver.alpha},
            {"max_iter", spec.solver.max_iter},
            {"tol", spec.solver.stop_tol}};
}

ProblemSpec load(const RunOptions &opts) {
    ProblemSpec spec = load_problem_spec(opts.spec_path);
    apply_overrides(spec, opts.overrides);
    validate(spec);
    return spec;
}

int run_project(const ProblemSpec &spec, const fs::path &out) {
    const SpaceContext ctx = spec.context();
    const ConvexSet &set = spec.sets.front();
    const PrimalVector &x = *spec.x0;
    const ProjectionTriple t = project_all(ctx, set, x, spec.solver.inner);
    const ProjectionResult &chosen = spec.mode == ProjectionMode::metric ? t.metric : t.Pi;
    const bool converged = t.metric.converged && t.Pi.converged && t.pi_of_Jx.converged;

    Trace trace;
    trace.method = "project";
    trace.mode = spec.mode;
    TraceRecord rec;
    rec.iter = 0;
    rec.displacement = norm(ctx, x - chosen.point);
    rec.x = x;
    trace.records.push_back(rec);
    trace.solution = chosen.point;
    trace.converged = converged;
    write_trace(out, trace);

    json summary = spec_json(spec);
    summary["projection"] = vector_to_json(chosen.point.coords());
    summary["metric"] = projection_json(t.metric);
    summary["Pi"] = projection_json(t.Pi);
    summary["pi_of_Jx"] = projection_json(t.pi_of_Jx);
    summary["converged"] = converged;
    write_json(out / "summary.json", summary);
    return converged ? exit_ok : exit_not_converged;
}

Trace solve(const ProblemSpec &spec, ProjectionMode mode) {
    const SpaceContext ctx = spec.context();
    const PrimalVector x0 = spec.start();
    switch (spec.task) {
    case Task::feasibility: return successive_projections(ctx, spec.sets, x0, mode, spec.solver, spec.reference);
    case Task::vi:
        if (spec.nonsmooth) return vi_solve_nonsmooth(ctx, spec.sets.front(), *spec.op, *spec.f, x0, spec.solver,
                                                      *spec.nonsmooth);
        if (mode == ProjectionMode::metric)
            return vi_solve_metric(ctx, spec.sets.front(), *spec.op, *spec.f, x0, spec.solver, spec.reference);
        return vi_solve_generalized(ctx, spec.sets.front(), *spec.op, *spec.f, x0, spec.solver, spec.reference);
    case Task::wiener_hopf: return wiener_hopf_solve(ctx, spec.sets.front(), *spec.op, *spec.f, x0, spec.solver, mode);
    case Task::unconstrained: return unconstrained_solve(ctx, *spec.op, *spec.f, x0, spec.solver);
    default: throw std::logic_error("solve: task has no solver");
    }
}

json diagnostics_json(const FeasibilityDiagnostics &g) {
    return {{"informational", g.informational},     {"max_v2_increase", g.max_v2_increase},
            {"monotone", g.monotone},               {"v2_sum", g.v2_sum},
            {"v2_tail_max", g.v2_tail_max},         {"summable", g.summable},
            {"final_displacement", g.final_displacement}, {"vanishing_steps", g.vanishing_steps},
            {"pass", g.pass()}};
}

json run_summary(const ProblemSpec &spec, const Trace &trace) {
    json summary = spec_json(spec);
    summary["mode"] = to_string(trace.mode);
    summary["result"] = trace_summary_json(trace);
    if (spec.task == Task::feasibility && spec.reference)
        summary["diagnostics"] = diagnostics_json(feasibility_diagnostics(spec.context(), trace, *spec.reference));
    return summary;
}

int run_solver(const ProblemSpec &spec, const fs::path &out) {
    const Trace trace = solve(spec, spec.mode);
    write_trace(out, trace);
    write_json(out / "summary.json", run_summary(spec, trace));
    return trace.converged ? exit_ok : exit_not_converged;
}

int run_verify(const ProblemSpec &spec, const fs::path &out) {
    const SuiteResult result = run_suite(spec.suite);
    std::ostringstream lines;
    write_reports_jsonl(lines, result.reports);
    write_file(out / "report.jsonl", lines.str());
    write_json(out / "summary.json", to_json(result.summary));
    return result.summary.failed == 0 ? exit_ok : exit_check_failed;
}

template <class F>
int guarded(std::ostream &log, F body) {
    try {
        return body();
    } catch (const SpecError &e) {
        log << "error: " << e.what() << "\n";
        return exit_invalid;
    } catch (const std::invalid_argument &e) {
        log << "error: " << e.what() << "\n";
        return exit_invalid;
    } catch (const fs::filesystem_error &e) {
        log << "error: " << e.what() << "\n";
        return exit_invalid;
    }
}

} // namespace

int run(const RunOptions &opts, std::ostream &log) {
    return guarded(log, [&] {
        const ProblemSpec spec = load(opts);
        const fs::path out = opts.out_dir.empty() ? fs::path(default_out_dir()) : fs::path(opts.out_dir);
        fs::create_directories(out);
        int code = exit_ok;
        switch (spec.task) {
        case Task::project: code = run_project(spec, out); break;
        case Task::verify: code = run_verify(spec, out); break;
        default: code = run_solver(spec, out); break;
        }
        if (code == exit_not_converged) log << "warning: " << to_string(spec.task) << " did not converge\n";
        if (code == exit_check_failed) log << "error: contractual checks failed; see report.jsonl\n";
        return code;
    });
}

int compare(const RunOptions &opts, std::ostream &log) {
    return guarded(log, [&] {
        const ProblemSpec spec = load(opts);
        if (spec.task != Task::feasibility && spec.task != Task::vi && spec.task != Task::wiener_hopf)
            throw SpecError("compare supports the feasibility, vi and wiener-hopf tasks, not " + to_string(spec.task));
        if (spec.nonsmooth) throw SpecError("compare does not support field 'solver.variant'");
        const fs::path out = opts.out_dir.empty() ? fs::path(default_out_dir()) : fs::path(opts.out_dir);
        const SpaceContext ctx = spec.context();

        const Trace metric = solve(spec, ProjectionMode::metric);
        const Trace generalized = solve(spec, ProjectionMode::generalized);
        write_trace(out / "metric", metric);
        write_trace(out / "generalized", generalized);

        const std::size_t common = std::min(metric.records.size(), generalized.records.size());
        double max_gap = 0.0;
        for (std::size_t i = 0; i < common; ++i)
            max_gap = std::max(max_gap, norm(ctx, metric.records[i].x - generalized.records[i].x));
        json delta = {{"steps_compared", common},
                      {"max_iterate_gap", max_gap},
                      {"solution_gap", norm(ctx, metric.solution - generalized.solution)},
                      {"iterations_metric", metric.records.empty() ? 0 : metric.records.back().iter},
                      {"iterations_generalized", generalized.records.empty() ? 0 : generalized.records.back().iter}};

        json summary = spec_json(spec);
        summary.erase("mode");
        summary["metric"] = run_summary(spec, metric);
        summary["generalized"] = run_summary(spec, generalized);
        summary["delta"] = std::move(delta);
        write_json(out / "summary.json", summary);
        // Only the generalized run carries a convergence contract.
        if (!generalized.converged) {
            log << "warning: generalized run did not converge\n";
            return static_cast<int>(exit_not_converged);
        }
        return static_cast<int>(exit_ok);
    });
}

} // namespace genproj
