#pragma once

// Front end behind the genproj executable: loads a problem spec, runs the
// requested task and writes trace.csv, trace.json, summary.json and, for the
// verify task, report.jsonl into the output directory.

#include "genproj/problem_spec.hpp"

#include <ostream>
#include <string>

namespace genproj {

enum ExitCode : int {
    exit_ok = 0,
    exit_invalid = 1,        ///< unreadable, malformed or inconsistent spec
    exit_not_converged = 2,  ///< solver or projection did not reach its tolerance
    exit_check_failed = 3,   ///< a contractual verify check failed
};

struct RunOptions {
    std::string spec_path;
    std::string out_dir;
    Overrides overrides;
};

/// Output directory when --out is absent: $OUT_DIR, else "out".
std::string default_out_dir();

/// Diagnostics go to `log`.
int run(const RunOptions &opts, std::ostream &log);

/// Runs a feasibility, vi or wiener-hopf spec in both metric and generalized
/// mode. Writes metric/ and generalized/ trace pairs plus a summary.json with
/// the per-step gap between the runs.
int compare(const RunOptions &opts, std::ostream &log);

} // namespace genproj
