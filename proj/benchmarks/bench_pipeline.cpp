#include "strideflex/cleaning.hpp"
#include "strideflex/gait_events.hpp"
#include "strideflex/kinematics.hpp"
#include "strideflex/stats/anova.hpp"
#include "strideflex/synthetic.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace strideflex;

namespace {

GeneratedSprint sprint(double strides) {
    GaitModel m = default_gait_model();
    m.duration_s = strides / m.stride_hz;
    return generate(m);
}

NoisyTrajectory noisy(const GeneratedSprint& g) {
    NoiseSpec ns;
    ns.set_loss_rate(0.02);
    ns.random_swaps_per_pair = 1;
    ns.misallocation_rate = 0.01;
    return inject_noise(g.trajectory, ns);
}

} // namespace

static void BM_FitSvrCurve(benchmark::State& state) {
    const GeneratedSprint g = sprint(static_cast<double>(state.range(0)));
    const Series s = extract_series(noisy(g).trajectory, JointId::l_ankle, Axis::y);
    for (auto _ : state) {
        benchmark::DoNotOptimize(fit_svr_curve(s, g.trajectory.fps(), {}));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.size()));
}
BENCHMARK(BM_FitSvrCurve)->Arg(2)->Arg(5)->Unit(benchmark::kMillisecond);

static void BM_CleanSprint(benchmark::State& state) {
    const GeneratedSprint g = sprint(5.0);
    const NoisyTrajectory n = noisy(g);
    for (auto _ : state) {
        benchmark::DoNotOptimize(clean(n.trajectory));
    }
}
BENCHMARK(BM_CleanSprint)->Unit(benchmark::kMillisecond)->Iterations(3);

static void BM_ComputeAngles(benchmark::State& state) {
    const GeneratedSprint g = sprint(5.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(compute_angles(g.trajectory));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.trajectory.frame_count()));
}
BENCHMARK(BM_ComputeAngles);

static void BM_DetectFootStrikes(benchmark::State& state) {
    const GeneratedSprint g = sprint(5.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(detect_foot_strikes(g.trajectory));
    }
}
BENCHMARK(BM_DetectFootStrikes);

static void BM_RmAnova(benchmark::State& state) {
    const auto subjects = static_cast<std::size_t>(state.range(0));
    stats::Factor between{"subject", {}};
    for (std::size_t s = 0; s < subjects; ++s) {
        between.levels.push_back("S" + std::to_string(s + 1));
    }
    stats::Design d(between, "sprint", 8,
                    {{"method", {"manual", "movenet", "cotracker"}},
                     {"time", {"0", "10", "20", "30", "40", "50", "60", "70", "80", "90"}}});
    std::mt19937_64 rng(1);
    std::normal_distribution<double> n(30.0, 10.0);
    for (double& v : d.values()) {
        v = n(rng);
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(stats::rm_anova(d));
    }
}
BENCHMARK(BM_RmAnova)->Arg(5)->Arg(20);
BENCHMARK_MAIN();
