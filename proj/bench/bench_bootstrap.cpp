// Serial reference vs OpenMP bootstrap on a Simulation-style sample.

#include <benchmark/benchmark.h>

#include "swlb/bootstrap.hpp"
#include "swlb/sim_harness.hpp"

namespace {

using namespace swlb;

SurveyDataset gaussian_sample(Index n) {
  Sim1Config c;
  c.sample_size = n;
  c.b1 = 0.1;
  c.rho = 0.8;
  Stream prng(1, 0), srng(1, 1);
  return draw_informative_sample(generate_population_sim1(c, prng), n, srng);
}

SurveyDataset probit_sample(Index n) {
  Sim2Config c;
  c.sample_size = n;
  c.b1 = 0.1;
  Stream prng(2, 0), srng(2, 1);
  return draw_informative_sample(generate_population_sim2(c, prng), n, srng);
}

template <bool Parallel>
void run(benchmark::State& state, const LikelihoodModel& model, const SurveyDataset& data) {
  const ScaledWeights scaled = scale_weights(data.raw_weights());
  BootstrapConfig config;
  config.b = 500;
  config.seed = 7;
  for (auto _ : state) {
    auto result = Parallel ? run_bootstrap(model, data, scaled, config, static_cast<int>(state.range(1)))
                           : run_bootstrap_serial(model, data, scaled, config);
    benchmark::DoNotOptimize(result.draws.data());
  }
  state.SetItemsProcessed(state.iterations() * config.b);
}

void BM_GaussianSerial(benchmark::State& state) {
  run<false>(state, GaussianMeanModel{}, gaussian_sample(state.range(0)));
}
void BM_GaussianParallel(benchmark::State& state) {
  run<true>(state, GaussianMeanModel{}, gaussian_sample(state.range(0)));
}
void BM_ProbitSerial(benchmark::State& state) {
  run<false>(state, ProbitRegressionModel(false), probit_sample(state.range(0)));
}
void BM_ProbitParallel(benchmark::State& state) {
  run<true>(state, ProbitRegressionModel(false), probit_sample(state.range(0)));
}

}  // namespace

BENCHMARK(BM_GaussianSerial)->Args({500, 1})->Args({2000, 1})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GaussianParallel)->ArgsProduct({{500, 2000}, {1, 2, 4, 8}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ProbitSerial)->Args({500, 1})->Args({2000, 1})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ProbitParallel)->ArgsProduct({{500, 2000}, {1, 2, 4, 8}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
