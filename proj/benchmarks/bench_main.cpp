#include "synbeats/csv.hpp"
#include "synbeats/estimator.hpp"
#include "synbeats/linalg.hpp"
#include "synbeats/nbeats.hpp"
#include "synbeats/rng.hpp"

#include <benchmark/benchmark.h>

using namespace synbeats;

namespace {

const Panel& prop99() {
    static const Panel p = load_panel_csv(SYNBEATS_BENCH_DATA);
    return p;
}

Eigen::MatrixXd random_matrix(Eigen::Index r, Eigen::Index c, std::uint64_t seed) {
    SplitMix64 rng(seed);
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = rng.normal();
    return m;
}

void BM_SvdSmall(benchmark::State& state) {
    const auto m = random_matrix(39, 31, 1);
    for (auto _ : state) benchmark::DoNotOptimize(svd_small(m));
}
BENCHMARK(BM_SvdSmall);

void BM_SimplexLeastSquares(benchmark::State& state) {
    const auto a = random_matrix(60, 10, 2);
    const Eigen::VectorXd y = random_matrix(60, 1, 3);
    for (auto _ : state) benchmark::DoNotOptimize(simplex_least_squares(a, y));
}
BENCHMARK(BM_SimplexLeastSquares);

// One full-batch loss and gradient pass: 18 windows, 38 controls.
void BM_NBeatsLossAndGradient(benchmark::State& state) {
    BlockConfig c = state.range(0) == 0 ? BlockConfig::smoke() : BlockConfig::paper();
    c.input_dim = 39;
    const ForecastModel m = make_model(c, 1, ForecastMode::synbeats, 0);
    const auto x = random_matrix(39, 18, 4);
    const auto y = random_matrix(1, 18, 5);
    std::vector<BlockGradient> g;
    for (auto _ : state) benchmark::DoNotOptimize(loss_and_gradient(m, x, y, g));
}
BENCHMARK(BM_NBeatsLossAndGradient)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Estimator(benchmark::State& state, const char* name) {
    const auto est = make_estimator(name);
    for (auto _ : state) benchmark::DoNotOptimize(est->predict(prop99(), 0));
}
BENCHMARK_CAPTURE(BM_Estimator, twfe, "twfe")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Estimator, sc, "sc")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Estimator, horizontal, "horizontal")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Estimator, sdid, "sdid")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Estimator, synbeats_smoke, "synbeats")->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
