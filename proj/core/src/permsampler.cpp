#include "confound/permsampler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "confound/parallel.hpp"

namespace confound {

namespace {

constexpr double kLogOddsClamp = 700.0;
constexpr std::uint64_t kHubStream = 0;

void check_square(const CondLogLik& ll, std::size_t n) {
  if (ll.size() != n)
    throw Error(ErrorCode::LengthMismatch, "log-likelihood matrix does not match permutation size");
}

}  // namespace

Permutation identity_permutation(std::size_t n) {
  Permutation perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  return perm;
}

bool is_permutation(std::span<const std::size_t> perm) noexcept {
  std::vector<bool> seen(perm.size(), false);
  for (std::size_t v : perm) {
    if (v >= perm.size() || seen[v]) return false;
    seen[v] = true;
  }
  return true;
}

double swap_log_odds(const CondLogLik& ll, std::span<const std::size_t> perm, std::size_t i,
                     std::size_t j) noexcept {
  const std::size_t a = perm[i];
  const std::size_t b = perm[j];
  return (ll(b, i) - ll(a, i)) + (ll(a, j) - ll(b, j));
}

void mcmc_sweep(std::span<std::size_t> perm, const CondLogLik& ll, Rng& rng,
                std::vector<std::size_t>& order) {
  const std::size_t n = perm.size();
  order.resize(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(std::span<std::size_t>(order));
  for (std::size_t k = 0; k + 1 < n; k += 2) {
    const std::size_t i = order[k];
    const std::size_t j = order[k + 1];
    const double log_odds = std::clamp(swap_log_odds(ll, perm, i, j), -kLogOddsClamp, kLogOddsClamp);
    const double accept = 1.0 / (1.0 + std::exp(-log_odds));
    if (rng.uniform() < accept) std::swap(perm[i], perm[j]);
  }
}

Permutation mcmc_sweep(Permutation perm, const CondLogLik& ll, Rng& rng) {
  check_square(ll, perm.size());
  std::vector<std::size_t> order;
  mcmc_sweep(perm, ll, rng, order);
  return perm;
}

void for_each_conditional_permutation(
    const CondLogLik& ll, const TestConfig& config,
    const std::function<void(std::size_t, std::span<const std::size_t>)>& visit) {
  config.validate();
  const std::size_t n = ll.size();
  if (n < 2) throw Error(ErrorCode::TooFewRows, "need at least two observations to permute");

  Permutation hub = identity_permutation(n);
  {
    Rng rng(derive_seed(config.seed, kHubStream));
    std::vector<std::size_t> order;
    for (std::size_t s = 0; s < config.mcmc_steps; ++s) mcmc_sweep(hub, ll, rng, order);
  }

  parallel_for(config.num_permutations, config.threads, [&](std::size_t j) {
    Rng rng(derive_seed(config.seed, j + 1));
    Permutation perm = hub;
    std::vector<std::size_t> order;
    for (std::size_t s = 0; s < config.mcmc_steps; ++s) mcmc_sweep(perm, ll, rng, order);
    visit(j, perm);
  });
}

PermutationDraws draw_conditional_permutations(const CondLogLik& ll, const TestConfig& config) {
  PermutationDraws draws;
  draws.steps_used = config.mcmc_steps;
  draws.seed = config.seed;
  draws.perms.resize(config.num_permutations);
  for_each_conditional_permutation(ll, config, [&](std::size_t j, std::span<const std::size_t> perm) {
    draws.perms[j].assign(perm.begin(), perm.end());
  });
  return draws;
}

}  // namespace confound
