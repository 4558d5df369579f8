// Serial-reference vs OpenMP kernel comparison. The dispatched kernels fall
// back to serial below kernels::parallel_grain, so small sizes measure the
// dispatch overhead honestly.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "fdabs/kernels.hpp"
#include "fdabs/radial_grid.hpp"
#include "fdabs/solver.hpp"

using namespace fdabs;

namespace {

std::vector<double> random_values(std::size_t n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v) x = dist(rng);
    return v;
}

void bm_weighted_pow_sum_serial_ref(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto u = random_values(n, 1);
    const auto w = random_values(n, 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            kernels::serial_ref::weighted_pow_sum(w, u, 1.5));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void bm_weighted_pow_sum(benchmark::State& state, kernels::Backend backend) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto u = random_values(n, 1);
    const auto w = random_values(n, 2);
    kernels::set_backend(backend);
    for (auto _ : state) {
        benchmark::DoNotOptimize(kernels::weighted_pow_sum(w, u, 1.5));
    }
    kernels::set_backend(kernels::Backend::Parallel);
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void bm_signed_pow(benchmark::State& state, kernels::Backend backend) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto u = random_values(n, 3);
    std::vector<double> dst(n);
    kernels::set_backend(backend);
    for (auto _ : state) {
        kernels::signed_pow(u, 0.5, dst);
        benchmark::DoNotOptimize(dst.data());
        benchmark::ClobberMemory();
    }
    kernels::set_backend(kernels::Backend::Parallel);
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void bm_newton_residual(benchmark::State& state, kernels::Backend backend) {
    const auto M = static_cast<std::size_t>(state.range(0));
    const Params p{1.0, 0.5, 0.75};
    const RadialGrid g = make_uniform_grid(p, 20.0, M);
    auto wv = random_values(M + 1, 4);
    const auto b = random_values(M + 1, 5);
    std::vector<double> u(M + 1), phi(M + 1), F(M + 1);
    kernels::set_backend(backend);
    for (auto _ : state) {
        kernels::newton_residual(wv, b, g.laplacian(), 1e-3, 2.0, 1.5, u, phi,
                                 F);
        benchmark::DoNotOptimize(F.data());
        benchmark::ClobberMemory();
    }
    kernels::set_backend(kernels::Backend::Parallel);
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void bm_full_step(benchmark::State& state, kernels::Backend backend) {
    const auto M = static_cast<std::size_t>(state.range(0));
    const Params p{1.0, 0.5, 0.75};
    const RadialGrid g = make_uniform_grid(p, 20.0, M);
    State s;
    s.t = 0.0;
    s.values.resize(M + 1);
    for (std::size_t i = 0; i <= M; ++i) {
        const double r = g.nodes[i];
        s.values[i] = r <= 1.0 ? 1.0 : std::pow(r, -8.0);
    }
    s.values[M] = 0.0;
    SolverConfig c;
    kernels::set_backend(backend);
    for (auto _ : state) {
        benchmark::DoNotOptimize(step(s, g, p, c, 1e-3));
    }
    kernels::set_backend(kernels::Backend::Parallel);
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

} // namespace

BENCHMARK(bm_weighted_pow_sum_serial_ref)->Arg(4096)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK_CAPTURE(bm_weighted_pow_sum, serial, kernels::Backend::Serial)
    ->Arg(4096)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK_CAPTURE(bm_weighted_pow_sum, omp, kernels::Backend::Parallel)
    ->Arg(4096)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK_CAPTURE(bm_signed_pow, serial, kernels::Backend::Serial)
    ->Arg(4096)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK_CAPTURE(bm_signed_pow, omp, kernels::Backend::Parallel)
    ->Arg(4096)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK_CAPTURE(bm_newton_residual, serial, kernels::Backend::Serial)
    ->Arg(4096)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK_CAPTURE(bm_newton_residual, omp, kernels::Backend::Parallel)
    ->Arg(4096)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK_CAPTURE(bm_full_step, serial, kernels::Backend::Serial)
    ->Arg(4096)->Arg(1 << 16);
BENCHMARK_CAPTURE(bm_full_step, omp, kernels::Backend::Parallel)
    ->Arg(4096)->Arg(1 << 16);

BENCHMARK_MAIN();
