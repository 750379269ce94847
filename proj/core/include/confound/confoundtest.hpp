#pragma once

// Partial test: H0 yhat _||_ c | y. Permutes c under an estimate of Q(c | y).
// Full test:    H0 yhat _||_ y | c. Permutes y under an estimate of Q(y | c).
//
// Both use T = R^2(yhat, permuted variable) and the Monte-Carlo p-value over
// m conditional permutations.

#include <vector>

#include "confound/condest.hpp"
#include "confound/core.hpp"
#include "confound/stats.hpp"

namespace confound {

struct ConfoundTestResult {
  TestKind kind = TestKind::partial;
  double p_value = 1.0;
  StatValue t_observed;
  std::vector<double> t_null;
  StatValue r2_y_c;
  StatValue r2_yhat_c;
  StatValue r2_yhat_y;
  TestConfig config_echo;
};

ConfoundTestResult partial_confound_test(const Triplet& t, const TestConfig& config = {});
ConfoundTestResult full_confound_test(const Triplet& t, const TestConfig& config = {});
ConfoundTestResult confound_test(TestKind kind, const Triplet& t, const TestConfig& config = {});

/// Runs the test with a caller-supplied log-likelihood matrix in place of the
/// fitted one (entry(i, j) = log q(permuted_i | conditioner_j)).
ConfoundTestResult confound_test_with_density(TestKind kind, const Triplet& t,
                                              const CondLogLik& ll, const TestConfig& config = {});

}  // namespace confound
