#pragma once

// Parallel-pairwise MCMC sampler over permutations. The target law weighs a
// permutation pi by prod_i q(response_{pi(i)} | conditioner_i), i.e.
//
//   log P(pi) = sum_i ll(pi(i), i) + const.
//
// Each sweep draws a uniformly random disjoint pairing and resamples every pair
// with the Barker rule r / (1 + r), r being the swap odds ratio.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "confound/condest.hpp"
#include "confound/core.hpp"
#include "confound/rng.hpp"

namespace confound {

using Permutation = std::vector<std::size_t>;

struct PermutationDraws {
  std::vector<Permutation> perms;
  std::size_t steps_used = 0;
  std::uint64_t seed = 0;
};

Permutation identity_permutation(std::size_t n);
bool is_permutation(std::span<const std::size_t> perm) noexcept;

/// Log odds of swapping the values at positions i and j.
double swap_log_odds(const CondLogLik& ll, std::span<const std::size_t> perm, std::size_t i,
                     std::size_t j) noexcept;

/// One sweep in place. `order` is scratch space resized to perm.size().
void mcmc_sweep(std::span<std::size_t> perm, const CondLogLik& ll, Rng& rng,
                std::vector<std::size_t>& order);

Permutation mcmc_sweep(Permutation perm, const CondLogLik& ll, Rng& rng);

/// Hub-and-spoke sampling: S sweeps from the identity reach a hub; each of the
/// m spokes runs S further sweeps from the hub with its own RNG stream derived
/// from (seed, spoke index). visit(j, perm) is called once per spoke, possibly
/// concurrently from several threads when config.threads != 1.
void for_each_conditional_permutation(
    const CondLogLik& ll, const TestConfig& config,
    const std::function<void(std::size_t, std::span<const std::size_t>)>& visit);

PermutationDraws draw_conditional_permutations(const CondLogLik& ll, const TestConfig& config);

}  // namespace confound
