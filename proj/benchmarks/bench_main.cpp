#include <benchmark/benchmark.h>

#include "comindex/factors.hpp"
#include "comindex/inference.hpp"
#include "comindex/numkernel.hpp"
#include "comindex/synthetic.hpp"

using namespace comindex;

namespace {

SyntheticData wide_data() {
  PlantedModel model;
  model.n_factors = 8;
  model.noise_variables = 2;
  return make_planted_dataset(model);
}

void BM_SymEigen(benchmark::State& state) {
  const auto data = wide_data();
  const Matrix r = correlation_matrix(standardize(data.dataset));
  for (auto _ : state) benchmark::DoNotOptimize(sym_eigen(r));
  state.SetLabel(std::to_string(r.rows()) + "x" + std::to_string(r.cols()));
}
BENCHMARK(BM_SymEigen);

void BM_Varimax(benchmark::State& state) {
  const auto data = wide_data();
  const Matrix r = correlation_matrix(standardize(data.dataset));
  const auto pca = extract_pca(r, RetentionRule::fixed(static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(varimax(pca.loadings));
}
BENCHMARK(BM_Varimax)->Arg(2)->Arg(5)->Arg(9);

void BM_FitFactorModel(benchmark::State& state) {
  const auto data = wide_data();
  const auto z = standardize(data.dataset);
  for (auto _ : state) benchmark::DoNotOptimize(fit_factor_model(z, data.dataset, {}));
}
BENCHMARK(BM_FitFactorModel);

void BM_TTests(benchmark::State& state) {
  NormalStream rng(1);
  std::vector<double> a(10), b(10);
  for (double& x : a) x = rng.next();
  for (double& x : b) x = 0.5 + 2.0 * rng.next();
  for (auto _ : state) {
    benchmark::DoNotOptimize(levene_test(a, b));
    benchmark::DoNotOptimize(t_test_pooled(a, b));
    benchmark::DoNotOptimize(t_test_welch(a, b));
  }
}
BENCHMARK(BM_TTests);

void BM_TQuantile(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(t_quantile(0.975, 18.0));
}
BENCHMARK(BM_TQuantile);

}  // namespace

BENCHMARK_MAIN();
