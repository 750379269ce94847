#include "confound/confoundtest.hpp"

#include "confound/permsampler.hpp"

namespace confound {

namespace {

void check_model_output(const Triplet& t) {
  if (t.yhat.is_categorical()) {
    throw Error(ErrorCode::ModelMisuse,
                "yhat is categorical; pass predicted class probabilities (numerical) "
                "for classifiers instead of hard labels");
  }
}

ConfoundTestResult run(TestKind kind, const Triplet& t, const CondLogLik& ll,
                       const TestConfig& config) {
  config.validate();
  check_model_output(t);
  if (ll.size() != t.n())
    throw Error(ErrorCode::LengthMismatch, "log-likelihood matrix does not match the triplet");
  if (!ll.all_finite())
    throw Error(ErrorCode::NumericalInstability, "conditional log-likelihood has non-finite entries");

  const Variable& permuted = kind == TestKind::partial ? t.c : t.y;
  const OtherRole role = kind == TestKind::partial ? OtherRole::confounder : OtherRole::target;

  ConfoundTestResult result;
  result.kind = kind;
  result.config_echo = config;
  result.t_observed = test_statistic(t.yhat, permuted, role);
  result.t_null.resize(config.num_permutations);
  for_each_conditional_permutation(ll, config, [&](std::size_t j, std::span<const std::size_t> perm) {
    result.t_null[j] = test_statistic(t.yhat, permuted.permuted(perm), role).value;
  });
  result.p_value = permutation_p_value(result.t_observed.value, result.t_null, config.p_value_mode);

  result.r2_y_c = association_r2(t.y, t.c);
  result.r2_yhat_c = test_statistic(t.yhat, t.c, OtherRole::confounder);
  result.r2_yhat_y = test_statistic(t.yhat, t.y, OtherRole::target);
  return result;
}

}  // namespace

ConfoundTestResult confound_test(TestKind kind, const Triplet& t, const TestConfig& config) {
  config.validate();
  check_model_output(t);
  const CondLogLik ll = kind == TestKind::partial
                            ? estimate_conditional_loglik(t.y, t.c, config.density)
                            : estimate_conditional_loglik(t.c, t.y, config.density);
  return run(kind, t, ll, config);
}

ConfoundTestResult partial_confound_test(const Triplet& t, const TestConfig& config) {
  return confound_test(TestKind::partial, t, config);
}

ConfoundTestResult full_confound_test(const Triplet& t, const TestConfig& config) {
  return confound_test(TestKind::full, t, config);
}

ConfoundTestResult confound_test_with_density(TestKind kind, const Triplet& t,
                                              const CondLogLik& ll, const TestConfig& config) {
  return run(kind, t, ll, config);
}

}  // namespace confound
