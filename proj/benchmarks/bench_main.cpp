#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "hemobnn/dsp.hpp"
#include "hemobnn/features.hpp"
#include "hemobnn/network.hpp"
#include "hemobnn/predict.hpp"
#include "hemobnn/rng.hpp"
#include "hemobnn/vi.hpp"

using namespace hemobnn;

namespace {

FeatureSet random_set(std::size_t n, std::size_t dim) {
  Rng rng(1);
  FeatureSet fs;
  fs.layout.windows = {{0.0, 1.0}};
  fs.layout.chromophores = {"x"};
  fs.layout.n_channels = dim;
  for (std::size_t i = 0; i < n; ++i) {
    FeatureVector v;
    v.label = static_cast<int>(i % 2);
    for (std::size_t d = 0; d < dim; ++d) v.values.push_back(rng.normal());
    fs.vectors.push_back(v);
  }
  return fs;
}

// One channel of a 26-minute recording at 10 Hz.
void BM_Filtfilt(benchmark::State& state) {
  const auto coeffs = design_bandpass(FilterSpec{}, 10.0);
  std::vector<double> x(static_cast<std::size_t>(state.range(0)));
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::sin(2 * std::numbers::pi * 0.05 * i / 10.0);
  for (auto _ : state) benchmark::DoNotOptimize(filtfilt(coeffs, x));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Filtfilt)->Arg(1000)->Arg(15600);

void BM_Backprop(benchmark::State& state) {
  const Architecture arch;
  const auto data = random_set(static_cast<std::size_t>(state.range(0)), 120);
  Rng rng(2);
  std::vector<double> w(arch.n_weights());
  rng.fill_normal(w);
  for (auto _ : state) benchmark::DoNotOptimize(backprop(arch, w, data));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Backprop)->Arg(35)->Arg(400);

void BM_ElboGradients(benchmark::State& state) {
  const Architecture arch;
  const auto data = random_set(35, 120);
  Rng init(3);
  const auto params = init_params(arch.n_weights(), init);
  Rng rng(4);
  for (auto _ : state)
    benchmark::DoNotOptimize(elbo_gradients(params, Prior{}, arch, data, 1, ElboMode::kMonteCarlo, rng));
}
BENCHMARK(BM_ElboGradients);

void BM_PosteriorPredictive(benchmark::State& state) {
  TrainedModel model;
  Rng init(5);
  model.params = init_params(model.arch.n_weights(), init);
  const auto x = random_set(1, 120).vectors[0].values;
  for (auto _ : state)
    benchmark::DoNotOptimize(posterior_predictive(model, x, static_cast<std::size_t>(state.range(0)), 6));
}
BENCHMARK(BM_PosteriorPredictive)->Arg(1000);

}  // namespace
BENCHMARK_MAIN();
