#include "skewlab/chain.hpp"
#include "skewlab/fv_solver.hpp"
#include "skewlab/local_time.hpp"
#include "skewlab/path_engine.hpp"

#include <benchmark/benchmark.h>

using namespace skewlab;

namespace {

MediumSpec two_sided() {
    Interface itf;
    itf.x = 0.0;
    itf.lambda = 2.0 / 3.0;
    return piecewise_constant_spec({-3.0, 3.0}, {0.5, 4.0}, {itf}, {1.0, 2.0}, {1.0, 3.0});
}

MediumSpec smooth_pieces() {
    auto spec = two_sided();
    spec.pieces[0].diffusion = Cubic{{1.0, 0.05, -0.01, 0.0}};
    spec.pieces[1].capacity = Cubic{{2.5, 0.0, 0.02, 0.0}};
    return spec;
}

void BM_SimulatePaths(benchmark::State& state) {
    const ScaleSpeed s{Medium(two_sided())};
    const auto chain = chain_parameters(s, build_grid(s.medium(), 0.01));
    const auto paths = static_cast<std::size_t>(state.range(0));
    std::uint64_t seed = 1;
    for (auto _ : state) {
        auto e = simulate_paths(chain, 0.0, 0.25, paths, seed++);
        benchmark::DoNotOptimize(e.total_occupation().data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulatePaths)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_ChainParameters(benchmark::State& state) {
    const ScaleSpeed s{Medium(smooth_pieces())};
    const auto grid = build_grid(s.medium(), 1.0 / static_cast<double>(state.range(0)));
    for (auto _ : state) {
        auto chain = chain_parameters(s, grid);
        benchmark::DoNotOptimize(chain.tau.data());
    }
}
BENCHMARK(BM_ChainParameters)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_ScaleQuadrature(benchmark::State& state) {
    const ScaleSpeed s{Medium(smooth_pieces())};
    double x = -2.9;
    for (auto _ : state) {
        benchmark::DoNotOptimize(s.expected_exit_time(x - 0.05, x + 0.05, x));
        x = x > 2.8 ? -2.9 : x + 0.013;
    }
}
BENCHMARK(BM_ScaleQuadrature);

void BM_FvAdvance(benchmark::State& state) {
    const Medium m(two_sided());
    const auto sys = assemble_system(m, static_cast<std::size_t>(state.range(0)), 1e-4);
    DensityField field{std::vector<double>(sys.size(), 1.0), 0.0};
    for (auto _ : state) {
        field = advance(sys, std::move(field), 100);
        benchmark::DoNotOptimize(field.u.data());
    }
    state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(BM_FvAdvance)->Arg(2000)->Arg(20000)->Unit(benchmark::kMillisecond);

void BM_JumpRatio(benchmark::State& state) {
    const Medium m(two_sided());
    const ScaleSpeed s{m};
    const auto chain = chain_parameters(s, build_grid(m, 0.01));
    const auto e = simulate_paths(chain, 0.0, 0.25, 5000, 3);
    for (auto _ : state) {
        auto rep = estimate_ratio(e, chain.grid, m, 0, default_epsilons(0.01));
        benchmark::DoNotOptimize(rep.estimated);
    }
}
BENCHMARK(BM_JumpRatio)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
