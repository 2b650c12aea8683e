#include <benchmark/benchmark.h>

#include "semint/analysis.hpp"
#include "semint/integration.hpp"
#include "semint/painting.hpp"
#include "semint/phenomenon.hpp"
#include "semint/puzzle.hpp"
#include "semint/rng.hpp"

using namespace semint;

namespace {

Painting standard_painting() {
    return generate_painting(3, {{"1", 10}, {"2", 2}, {"3", 88}});
}

DicePhenomenon fair_dice() {
    DiceConfig cfg;
    cfg.face_weights.assign(6, Rational(1, 6));
    return DicePhenomenon(cfg);
}

}  // namespace

static void BM_DiceSampling(benchmark::State& state) {
    DicePhenomenon ph = fair_dice();
    Rng rng(1);
    for (auto _ : state) {
        Sample s = ph.sample(rng);
        benchmark::DoNotOptimize(s);
    }
}
BENCHMARK(BM_DiceSampling);

static void BM_ReplicaPlacement(benchmark::State& state) {
    const auto trials = static_cast<std::uint64_t>(state.range(0));
    DicePhenomenon ph = fair_dice();
    PointsGrid grid(ph.complexified_view());
    for (auto _ : state) {
        Rng rng(7);
        ReplicaSet rs(grid.cell_count());
        for (std::uint64_t t = 0; t < trials; ++t) {
            rs.place(grid.flatten(grid.discretize_sample(ph.sample(rng))));
        }
        benchmark::DoNotOptimize(rs.occupied_cell_count());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(trials) * state.iterations());
}
BENCHMARK(BM_ReplicaPlacement)->Arg(1000)->Arg(10000);

static void BM_UrnSemintRun(benchmark::State& state) {
    UrnPhenomenon urn(standard_painting());
    SemintConfig cfg;
    for (auto _ : state) {
        SemintResult r = run_semint(urn, cfg, 2);
        benchmark::DoNotOptimize(r.saturation_trial);
    }
}
BENCHMARK(BM_UrnSemintRun);

static void BM_BorderGame(benchmark::State& state) {
    Painting p = standard_painting();
    const auto replicas = static_cast<std::uint32_t>(state.range(0));
    for (auto _ : state) {
        ReconstructionReport r = reconstruct_by_borders(p, replicas, 7);
        benchmark::DoNotOptimize(r.extractions);
    }
}
BENCHMARK(BM_BorderGame)->Arg(1)->Arg(10);

static void BM_ProbabilityGame(benchmark::State& state) {
    Painting p = standard_painting();
    for (auto _ : state) {
        TrialTrace t = probability_game(p, 100000, 5);
        benchmark::DoNotOptimize(t.records.size());
    }
}
BENCHMARK(BM_ProbabilityGame);

static void BM_ResidualDifference(benchmark::State& state) {
    for (auto _ : state) {
        ResidualComparison rc = residual_difference(1000, 100, 17, 53, 9);
        benchmark::DoNotOptimize(rc.reduced);
    }
}
BENCHMARK(BM_ResidualDifference);

static void BM_ConcentrationCheck(benchmark::State& state) {
    DicePhenomenon ph = fair_dice();
    LLNConfig cfg;
    cfg.label = "3";
    cfg.runs = 50;
    cfg.trial_schedule = {500};
    for (auto _ : state) {
        LLNReport r = lln_check(ph, cfg, *ph.ground_truth(), 9);
        benchmark::DoNotOptimize(r.fraction);
    }
}
BENCHMARK(BM_ConcentrationCheck);

BENCHMARK_MAIN();
