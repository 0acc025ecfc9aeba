#include "etuq/cross.hpp"
#include "etuq/fit.hpp"
#include "etuq/lowrank.hpp"
#include "etuq/model_io.hpp"
#include "etuq/quadrature.hpp"
#include "etuq/sparse_grid.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <memory>
#include <random>

using namespace etuq;

namespace {

void BM_GaussLegendre(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(gauss_legendre(n));
}
BENCHMARK(BM_GaussLegendre)->Arg(2)->Arg(16)->Arg(64);

void BM_ClenshawCurtis(benchmark::State& state) {
    const int level = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(clenshaw_curtis(level));
}
BENCHMARK(BM_ClenshawCurtis)->Arg(3)->Arg(8)->Arg(12);

void BM_SparseGrid12(benchmark::State& state) {
    const std::vector<Interval> box(12, Interval{0.122, 0.218});
    const int level = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(build_sparse_grid(12, level, Growth::smolyak, box));
}
BENCHMARK(BM_SparseGrid12)->DenseRange(1, 4)->Unit(benchmark::kMillisecond);

void BM_Maxvol(benchmark::State& state) {
    std::mt19937_64 gen(3);
    std::normal_distribution<double> nd;
    Eigen::MatrixXd m(state.range(0), state.range(1));
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = nd(gen);
    for (auto _ : state) benchmark::DoNotOptimize(maxvol(m));
}
BENCHMARK(BM_Maxvol)->Args({50, 5})->Args({500, 20})->Args({4000, 40});

// smooth, non-separable function on a 12-dim grid with 3 nodes per mode
void BM_GreedyCross(benchmark::State& state) {
    const std::vector<std::size_t> dims(12, 3);
    const int sweeps = static_cast<int>(state.range(0));
    for (auto _ : state) {
        FunctionOracle oracle(dims, [](std::span<const std::size_t> i) {
            double s = 0.0;
            for (std::size_t n = 0; n < i.size(); ++n) s += (1.0 + 0.1 * static_cast<double>(n)) * static_cast<double>(i[n]);
            return 1.0 / (1.0 + 0.05 * s);
        });
        GreedyCrossOptions opt;
        opt.sweeps = sweeps;
        benchmark::DoNotOptimize(greedy_tt_cross(oracle, opt));
    }
}
BENCHMARK(BM_GreedyCross)->Arg(2)->Arg(5)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_DeskTransient(benchmark::State& state) {
    const auto model = std::make_shared<const ETModel>(load_model(ETUQ_DATA_DIR "/desk_model.json"));
    ElectroThermalSolver solver(model);
    const std::vector<double> delta(model->wires.size(), 0.17);
    for (auto _ : state) benchmark::DoNotOptimize(solver.run_transient(delta).t_max);
}
BENCHMARK(BM_DeskTransient)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
