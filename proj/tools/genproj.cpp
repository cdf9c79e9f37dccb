// genproj run --spec problem.json [--out dir] [overrides]
// genproj compare --spec problem.json [--out dir] [overrides]

#include "genproj/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

void add_common(CLI::App &cmd, genproj::RunOptions &opts, std::string &mode, std::string &task, double &p,
                double &alpha, int &max_iter, double &tol, std::uint64_t &seed) {
    cmd.add_option("--spec", opts.spec_path, "Problem spec (JSON)")->required();
    cmd.add_option("--out", opts.out_dir, "Output directory (default: $OUT_DIR, else ./out)");
    cmd.add_option("--seed", seed, "Random seed");
    cmd.add_option("--p", p, "Exponent of the l^p space")->check(CLI::PositiveNumber);
    cmd.add_option("--alpha", alpha, "Step size, or alpha_0 for the diminishing schedule");
    cmd.add_option("--max-iter", max_iter, "Iteration cap");
    cmd.add_option("--tol", tol, "Stopping tolerance");
    cmd.add_option("--mode", mode, "Projection mode")->check(CLI::IsMember({"metric", "generalized"}));
    cmd.add_option("--task", task, "Task")->check(
        CLI::IsMember({"project", "feasibility", "vi", "wiener-hopf", "verify", "unconstrained"}));
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Metric and generalized projections in l^p: solvers and property checks"};
    app.require_subcommand(1);

    genproj::RunOptions opts;
    std::string mode, task;
    double p = 0.0, alpha = 0.0, tol = 0.0;
    int max_iter = 0;
    std::uint64_t seed = 0;

    CLI::App *run = app.add_subcommand("run", "Run the task of a spec");
    CLI::App *compare = app.add_subcommand("compare", "Run a spec in metric and generalized mode side by side");
    for (CLI::App *cmd : {run, compare}) add_common(*cmd, opts, mode, task, p, alpha, max_iter, tol, seed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : genproj::exit_invalid;
    }

    CLI::App *cmd = run->parsed() ? run : compare;
    genproj::Overrides &o = opts.overrides;
    if (cmd->count("--seed")) o.seed = seed;
    if (cmd->count("--p")) o.p = p;
    if (cmd->count("--alpha")) o.alpha = alpha;
    if (cmd->count("--max-iter")) o.max_iter = max_iter;
    if (cmd->count("--tol")) o.tol = tol;
    if (cmd->count("--mode")) o.mode = genproj::projection_mode_from_string(mode);
    if (cmd->count("--task")) o.task = genproj::task_from_string(task);

    return run->parsed() ? genproj::run(opts, std::cerr) : genproj::compare(opts, std::cerr);
}
