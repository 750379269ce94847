#include <benchmark/benchmark.h>

#include "confound/condest.hpp"
#include "confound/confoundtest.hpp"
#include "confound/permsampler.hpp"
#include "confound/simlab.hpp"

namespace {

confound::Triplet make_triplet(std::size_t n) {
  confound::SimSpec spec;
  spec.n = n;
  spec.w_yc = 1.0;
  spec.w_yyhat = 1.0;
  spec.seed = 42;
  return confound::simulate_triplet(spec);
}

void BM_FitGam(benchmark::State& state) {
  const auto t = make_triplet(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto fit = confound::fit_gam(t.y.values(), t.c.values());
    benchmark::DoNotOptimize(fit.sigma);
  }
}
BENCHMARK(BM_FitGam)->Arg(100)->Arg(500)->Arg(1000);

void BM_LogLikMatrix(benchmark::State& state) {
  const auto t = make_triplet(static_cast<std::size_t>(state.range(0)));
  const auto fit = confound::fit_gam(t.y.values(), t.c.values());
  for (auto _ : state) {
    auto ll = confound::gaussian_loglik_matrix(fit, t.c.values());
    benchmark::DoNotOptimize(ll(0, 0));
  }
}
BENCHMARK(BM_LogLikMatrix)->Arg(100)->Arg(1000);

void BM_McmcSweep(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto t = make_triplet(n);
  const auto ll = confound::estimate_conditional_loglik(t.y, t.c);
  confound::Rng rng(1);
  auto perm = confound::identity_permutation(n);
  std::vector<std::size_t> order;
  for (auto _ : state) {
    confound::mcmc_sweep(perm, ll, rng, order);
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n / 2));
}
BENCHMARK(BM_McmcSweep)->Arg(100)->Arg(1000);

void BM_PartialTest(benchmark::State& state) {
  const auto t = make_triplet(static_cast<std::size_t>(state.range(0)));
  confound::TestConfig config;
  config.num_permutations = 500;
  for (auto _ : state) {
    auto result = confound::partial_confound_test(t, config);
    benchmark::DoNotOptimize(result.p_value);
  }
}
BENCHMARK(BM_PartialTest)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
