#include <random>

#include <benchmark/benchmark.h>

#include "pivlp/kernels.hpp"
#include "pivlp/pivotal_dist.hpp"
#include "pivlp/process_models.hpp"

using namespace pivlp;

namespace {

std::vector<double> noise(std::size_t n) {
    std::mt19937_64 gen(1);
    std::normal_distribution<double> nd;
    std::vector<double> x(n);
    for (auto& v : x) v = nd(gen);
    return x;
}

Exec mode(const benchmark::State& st) { return st.range(1) == 0 ? Exec::Serial : Exec::Parallel; }

void BM_LaggedPartialSums(benchmark::State& st) {
    const auto x = noise(static_cast<std::size_t>(st.range(0)));
    const auto grid = LambdaGrid::uniform();
    for (auto _ : st) benchmark::DoNotOptimize(kernels::lagged_partial_sums(x, 20, grid, mode(st)));
}

void BM_MaConvolve(benchmark::State& st) {
    const std::size_t n = static_cast<std::size_t>(st.range(0));
    const auto theta = ma_coefficients(builtin_spec("ma-poly"), 10000);
    const auto e = noise(n + 10000);
    for (auto _ : st) benchmark::DoNotOptimize(kernels::ma_convolve(theta, e, n, mode(st)));
}

void BM_DrawW(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(draw_w(static_cast<std::size_t>(st.range(0)), 2000, 1, mode(st)));
}

}  // namespace

BENCHMARK(BM_LaggedPartialSums)->ArgsProduct({{1000, 100000}, {0, 1}});
BENCHMARK(BM_MaConvolve)->ArgsProduct({{1000}, {0, 1}});
BENCHMARK(BM_DrawW)->ArgsProduct({{2000}, {0, 1}});

BENCHMARK_MAIN();
