#include <benchmark/benchmark.h>

#include <random>

#include "mgm/glm.hpp"
#include "mgm/mgm.hpp"
#include "mgm/mvar.hpp"
#include "mgm/samplers.hpp"

using namespace mgm;

namespace {

GlmProblem problem(Family family, int n, int q) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> z;
  GlmProblem pr;
  pr.family = family;
  pr.x.resize(n, q);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < q; ++j) pr.x(i, j) = z(rng);
  pr.y.resize(n);
  for (int i = 0; i < n; ++i) {
    const double eta = pr.x(i, 0) - 0.5 * pr.x(i, 1);
    if (family == Family::gaussian) {
      pr.y[i] = eta + z(rng);
    } else {
      pr.classes = 3;
      const double w[3] = {1.0, std::exp(eta), std::exp(-eta)};
      pr.y[i] = std::discrete_distribution<int>(w, w + 3)(rng);
    }
  }
  return pr;
}

FactorModel mgm_model() {
  FactorModel m;
  m.specs = {VariableSpec::gaussian(), VariableSpec::categorical(2), VariableSpec::categorical(4),
             VariableSpec::gaussian()};
  m.thresholds = {{0.0}, {0.0, 0.0}, {0.0, 0.0, 0.0, 0.0}, {0.0}};
  m.sds = {1.0, 1.0, 1.0, 1.0};
  m.factors.push_back({{0, 3}, NdArray({1, 1}, std::vector<double>{0.5})});
  NdArray b({2, 4});
  b[0] = b[1] = 1.0;
  m.factors.push_back({{1, 2}, b});
  NdArray c({1, 2});
  c[0] = 1.0;
  m.factors.push_back({{0, 1}, c});
  return m;
}

void BM_GaussianPath(benchmark::State& state) {
  const GlmProblem pr = problem(Family::gaussian, static_cast<int>(state.range(0)), 20);
  const auto lambdas = lambda_path(pr, 100);
  for (auto _ : state) benchmark::DoNotOptimize(fit_path(pr, lambdas));
}
BENCHMARK(BM_GaussianPath)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_MultinomialPath(benchmark::State& state) {
  const GlmProblem pr = problem(Family::multinomial, static_cast<int>(state.range(0)), 10);
  const auto lambdas = lambda_path(pr, 100);
  for (auto _ : state) benchmark::DoNotOptimize(fit_path(pr, lambdas));
}
BENCHMARK(BM_MultinomialPath)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_GibbsSample(benchmark::State& state) {
  const FactorModel m = mgm_model();
  for (auto _ : state) benchmark::DoNotOptimize(sample_mgm(m, static_cast<int>(state.range(0)), 1));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GibbsSample)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_FitMgm(benchmark::State& state) {
  const Dataset data = sample_mgm(mgm_model(), 500, 1);
  MgmOptions o;
  o.selection.method = state.range(0) == 0 ? LambdaSelection::ebic : LambdaSelection::cv;
  for (auto _ : state) benchmark::DoNotOptimize(fit_mgm(data, o));
}
BENCHMARK(BM_FitMgm)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_FitMvar(benchmark::State& state) {
  MvarModel m;
  m.specs.assign(4, VariableSpec::gaussian());
  m.coefficients = MvarCoefficients(4, 1, {1});
  for (int s = 0; s < 4; ++s) m.coefficients.at(s, (s + 1) % 4, 0, 0, 0) = 0.3;
  m.thresholds.assign(4, {0.0});
  m.sds.assign(4, 1.0);
  const Dataset data = sample_mvar(m, 300, 1);
  for (auto _ : state) benchmark::DoNotOptimize(fit_mvar(data, {1, 2}, MvarOptions{}));
}
BENCHMARK(BM_FitMvar)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
