#include <benchmark/benchmark.h>

#include "leanreg/bootstrap.hpp"
#include "leanreg/simlab.hpp"

namespace {

leanreg::Dataset make_data(std::size_t n, std::size_t p) {
  leanreg::Rng rng = leanreg::make_rng(1, 0);
  return leanreg::sample(leanreg::Dgp::linear(p), n, rng);
}

void BM_FitOls(benchmark::State& state) {
  const auto data = make_data(static_cast<std::size_t>(state.range(0)),
                              static_cast<std::size_t>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(leanreg::fit_ols(data));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FitOls)->Args({1000, 3})->Args({10000, 3})->Args({10000, 10});

void BM_Sandwich(benchmark::State& state) {
  const auto fit = leanreg::fit_ols(make_data(static_cast<std::size_t>(state.range(0)),
                                              static_cast<std::size_t>(state.range(1))));
  for (auto _ : state) benchmark::DoNotOptimize(leanreg::sandwich_avar(fit));
}
BENCHMARK(BM_Sandwich)->Args({1000, 3})->Args({10000, 10});

void BM_Bootstrap(benchmark::State& state) {
  const auto fit = leanreg::fit_ols(make_data(500, 3));
  leanreg::BootstrapOptions o;
  o.b = static_cast<std::size_t>(state.range(0));
  o.method = state.range(1) == 0 ? leanreg::BootstrapMethod::multiplier
                                 : leanreg::BootstrapMethod::resample_m_of_n;
  for (auto _ : state) benchmark::DoNotOptimize(leanreg::run_bootstrap(fit, o));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Bootstrap)->Args({1000, 0})->Args({1000, 1})->Unit(benchmark::kMillisecond);

void BM_EigSym(benchmark::State& state) {
  const auto p = static_cast<std::size_t>(state.range(0));
  leanreg::Rng rng = leanreg::make_rng(2, 0);
  std::normal_distribution<double> z;
  leanreg::Mat g(p, p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j) g(i, j) = z(rng);
  const leanreg::Mat a = leanreg::transpose(g) * g;
  for (auto _ : state) benchmark::DoNotOptimize(leanreg::eig_sym(a));
}
BENCHMARK(BM_EigSym)->Arg(2)->Arg(5)->Arg(10)->Arg(30);

}  // namespace

BENCHMARK_MAIN();
