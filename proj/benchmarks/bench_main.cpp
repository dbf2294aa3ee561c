#include <benchmark/benchmark.h>

#include <algorithm>
#include <random>

#include "tvpdr/tvpdr.hpp"

using namespace tvpdr;

namespace {

std::vector<double> design(std::size_t periods, std::size_t d) {
  std::mt19937_64 gen(1);
  std::normal_distribution<double> z;
  std::vector<double> x(periods * d);
  for (std::size_t t = 0; t < periods; ++t) {
    x[t * d] = 1.0;
    for (std::size_t i = 1; i < d; ++i) x[t * d + i] = z(gen);
  }
  return x;
}

RegressionData synthetic(std::size_t periods) {
  std::mt19937_64 gen(2);
  std::normal_distribution<double> z;
  RegressionData data;
  data.periods = periods;
  data.raw_columns = 3;
  for (std::size_t t = 0; t < periods; ++t) {
    const double a = z(gen), b = z(gen);
    data.covariates.insert(data.covariates.end(), {1.0, a, b});
    data.outcome.push_back(1.0 + 0.8 * a - 0.5 * b + z(gen));
  }
  return data;
}

}  // namespace

static void BM_CholeskyBanded(benchmark::State& state) {
  const auto periods = static_cast<std::size_t>(state.range(0));
  const auto x = design(periods, 3);
  const BandedMatrix k = assemble_precision(x, periods, std::vector<double>{0.01, 0.01, 0.01});
  for (auto _ : state) benchmark::DoNotOptimize(cholesky_banded(k));
}
BENCHMARK(BM_CholeskyBanded)->Arg(100)->Arg(400)->Arg(1600);

static void BM_UnconstrainedDraw(benchmark::State& state) {
  const auto periods = static_cast<std::size_t>(state.range(0));
  const auto x = design(periods, 3);
  const std::vector<double> latent(periods, 0.3), s2{0.01, 0.01, 0.01};
  RngHandle rng(1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(draw_beta_unconstrained(x, latent, s2, rng));
}
BENCHMARK(BM_UnconstrainedDraw)->Arg(100)->Arg(400);

static void BM_GibbsIterations(benchmark::State& state) {
  const auto data = synthetic(static_cast<std::size_t>(state.range(0)));
  const auto [lo, hi] = std::minmax_element(data.outcome.begin(), data.outcome.end());
  ModelSpec spec;
  spec.grid = ThresholdGrid::build(*lo, *hi, (*hi - *lo) / 19.0);
  spec.iterations = 20;
  spec.burnin = 10;
  spec.monotone = state.range(1) != 0;
  for (auto _ : state) {
    RngHandle rng(3, 0);
    benchmark::DoNotOptimize(run_gibbs(spec, data, rng));
  }
  state.SetItemsProcessed(state.iterations() * std::int64_t(spec.iterations));
}
BENCHMARK(BM_GibbsIterations)->Args({100, 1})->Args({100, 0})->Args({400, 1})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
