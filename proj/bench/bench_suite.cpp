// Serial reference against the OpenMP fan-out of the verification suite.

#include "genproj/verify.hpp"

#include <benchmark/benchmark.h>

using namespace genproj;

namespace {

SuiteConfig reduced(CheckFamily family) {
    SuiteConfig cfg;
    cfg.families = {family};
    cfg.inequality_units = 20;
    cfg.projection_instances = 6;
    cfg.projection_samples = 200;
    cfg.stability_instances = 5;
    cfg.feasibility_instances = 5;
    cfg.vi_instances = 5;
    return cfg;
}

void run(benchmark::State &state, bool parallel) {
    const SuiteConfig cfg = reduced(static_cast<CheckFamily>(state.range(0)));
    for (auto _ : state) {
        SuiteResult r = parallel ? run_suite_parallel(cfg) : run_suite_serial(cfg);
        benchmark::DoNotOptimize(r.reports.data());
    }
    state.SetLabel(to_string(static_cast<CheckFamily>(state.range(0))));
}

void BM_SuiteSerial(benchmark::State &state) { run(state, false); }
void BM_SuiteParallel(benchmark::State &state) { run(state, true); }

void families(benchmark::internal::Benchmark *b) {
    for (CheckFamily f : all_check_families()) b->Arg(static_cast<int>(f));
    b->Unit(benchmark::kMillisecond);
}

} // namespace

BENCHMARK(BM_SuiteSerial)->Apply(families);
BENCHMARK(BM_SuiteParallel)->Apply(families);

BENCHMARK_MAIN();
