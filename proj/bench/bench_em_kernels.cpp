// Parallel vs serial reference EM kernels. Run with OMP_NUM_THREADS to vary
// the thread count; the second argument of each benchmark is alpha.

#include <benchmark/benchmark.h>

#include "convtrace/em_kernels.hpp"
#include "convtrace/rng.hpp"
#include "convtrace/synth.hpp"

using namespace convtrace;
using namespace convtrace::em;

namespace {

struct Fixture {
    Plane plane;
    Grid weights;
    Grid residuals;
    std::vector<double> kernel;

    Fixture(std::size_t side, int alpha)
        : plane(synth::gen_smoothed_noise_image(1, side, side).r),
          weights(side - 2 * static_cast<std::size_t>(alpha), side - 2 * static_cast<std::size_t>(alpha)),
          kernel(kernel_length(alpha), 1.0 / static_cast<double>(kernel_length(alpha)))
    {
        Xoshiro256 rng(2);
        for (double& w : weights.data) w = rng.uniform();
        reference::residuals(plane, alpha, kernel, residuals);
    }
};

template <bool Parallel>
void BM_Residuals(benchmark::State& state)
{
    const int alpha = static_cast<int>(state.range(1));
    Fixture f(static_cast<std::size_t>(state.range(0)), alpha);
    Grid out;
    for (auto _ : state) {
        if constexpr (Parallel) parallel::residuals(f.plane, alpha, f.kernel, out);
        else reference::residuals(f.plane, alpha, f.kernel, out);
        benchmark::DoNotOptimize(out.data.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.residuals.size()));
}

template <bool Parallel>
void BM_Posterior(benchmark::State& state)
{
    Fixture f(static_cast<std::size_t>(state.range(0)), static_cast<int>(state.range(1)));
    Grid out;
    for (auto _ : state) {
        if constexpr (Parallel) parallel::posterior(f.residuals, 0.01, 0.5, 1.0, out);
        else reference::posterior(f.residuals, 0.01, 0.5, 1.0, out);
        benchmark::DoNotOptimize(out.data.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.residuals.size()));
}

template <bool Parallel>
void BM_NormalEquations(benchmark::State& state)
{
    const int alpha = static_cast<int>(state.range(1));
    Fixture f(static_cast<std::size_t>(state.range(0)), alpha);
    for (auto _ : state) {
        NormalEquations eq = Parallel ? parallel::normal_equations(f.plane, f.weights, alpha)
                                      : reference::normal_equations(f.plane, f.weights, alpha);
        benchmark::DoNotOptimize(eq.lhs.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.weights.size()));
}

template <bool Parallel>
void BM_Energy(benchmark::State& state)
{
    const int alpha = static_cast<int>(state.range(1));
    Fixture f(static_cast<std::size_t>(state.range(0)), alpha);
    for (auto _ : state) {
        double e = Parallel ? parallel::energy(f.plane, f.weights, alpha, f.kernel)
                            : reference::energy(f.plane, f.weights, alpha, f.kernel);
        benchmark::DoNotOptimize(e);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.weights.size()));
}

void Sizes(benchmark::internal::Benchmark* b)
{
    for (int alpha : {1, 3})
        for (int side : {128, 256, 512}) b->Args({side, alpha});
    b->Unit(benchmark::kMicrosecond);
}

}  // namespace

BENCHMARK(BM_Residuals<true>)->Name("residuals/parallel")->Apply(Sizes);
BENCHMARK(BM_Residuals<false>)->Name("residuals/reference")->Apply(Sizes);
BENCHMARK(BM_Posterior<true>)->Name("posterior/parallel")->Apply(Sizes);
BENCHMARK(BM_Posterior<false>)->Name("posterior/reference")->Apply(Sizes);
BENCHMARK(BM_NormalEquations<true>)->Name("normal_equations/parallel")->Apply(Sizes);
BENCHMARK(BM_NormalEquations<false>)->Name("normal_equations/reference")->Apply(Sizes);
BENCHMARK(BM_Energy<true>)->Name("energy/parallel")->Apply(Sizes);
BENCHMARK(BM_Energy<false>)->Name("energy/reference")->Apply(Sizes);

BENCHMARK_MAIN();
