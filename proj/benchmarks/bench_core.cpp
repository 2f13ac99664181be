#include <benchmark/benchmark.h>

#include <cmath>

#include "tclab/fokkerplanck.hpp"
#include "tclab/stats.hpp"

using namespace tclab;

namespace {

ProcessSpec brownian() {
    ProcessSpec s;
    s.variant = BrownianMotion{0.0};
    return s;
}

CoefficientModel sine_model() {
    return CoefficientModel([](double x) { return 2.0 + std::sin(x); },
                            [](double t, double) { return 1.0 + 0.5 * t; }, 1.0);
}

std::vector<double> grid(int points) {
    std::vector<double> g(points);
    for (int k = 0; k < points; ++k) g[k] = 1.0 * k / (points - 1);
    g[0] = 0.0;
    return g;
}

void BM_SampleBrownianPath(benchmark::State& state) {
    const double mesh = 1.0 / static_cast<double>(state.range(0));
    std::uint64_t seed = 0;
    for (auto _ : state) {
        CounterRng rng(++seed);
        benchmark::DoNotOptimize(sample_path(brownian(), 4.0, mesh, rng));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SampleBrownianPath)->RangeMultiplier(4)->Range(64, 4096)->Complexity();

void BM_BuildTimeChange(benchmark::State& state) {
    const auto model = sine_model();
    const auto tgrid = grid(static_cast<int>(state.range(0)));
    std::uint64_t seed = 0;
    for (auto _ : state) {
        CounterRng rng(++seed);
        const RcllPath path = sample_path(brownian(), 8.0, 0.0125, rng);
        benchmark::DoNotOptimize(build_time_change(path, model, tgrid, {}));
    }
}
BENCHMARK(BM_BuildTimeChange)->Arg(21)->Arg(81);

void BM_SimulateBundle(benchmark::State& state) {
    const auto model = sine_model();
    const auto tgrid = grid(21);
    SimulateOptions opts;
    opts.mesh = 1.0 / static_cast<double>(state.range(0));
    std::uint64_t index = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(simulate_bundle(brownian(), model, tgrid, 17, ++index, opts));
    }
}
BENCHMARK(BM_SimulateBundle)->Arg(80)->Arg(400);

void BM_FpResidual(benchmark::State& state) {
    const auto model = sine_model();
    const auto tgrid = grid(21);
    SimulateOptions opts;
    opts.workers = 4;
    const auto ens =
        simulate_marginals(brownian(), model, static_cast<std::size_t>(state.range(0)), tgrid, 3, opts);
    const auto dict = default_dictionary();
    for (auto _ : state) {
        benchmark::DoNotOptimize(fp_residual(ens, brownian(), model, dict));
    }
}
BENCHMARK(BM_FpResidual)->Arg(1000)->Arg(4000);

void BM_KsTwoSample(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    CounterRng rng(5);
    std::vector<double> a(n), b(n);
    for (auto& v : a) v = rng.next_gaussian();
    for (auto& v : b) v = rng.next_gaussian();
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    for (auto _ : state) {
        benchmark::DoNotOptimize(ks_two_sample(a, b));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_KsTwoSample)->RangeMultiplier(4)->Range(1024, 65536)->Complexity();

}  // namespace

BENCHMARK_MAIN();
