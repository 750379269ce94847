#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <vector>

#include "confound/confoundtest.hpp"
#include "confound/permsampler.hpp"
#include "confound/simlab.hpp"
#include "oracles.hpp"

using namespace confound;

namespace {

Triplet make(const std::vector<double>& y, const std::vector<double>& yhat, const std::vector<double>& c) {
  return validate_triplet(Variable::numerical(y), Variable::numerical(yhat), Variable::numerical(c));
}

}  // namespace

TEST(PartialTest, YhatEqualsConfounderIsDetected) {
  const auto y = oracle::normal_draws(100, 1);
  const auto c = oracle::normal_draws(100, 2);
  TestConfig cfg;
  cfg.seed = 3;
  const auto res = partial_confound_test(make(y, c, c), cfg);
  EXPECT_LE(res.p_value, 0.01);
  EXPECT_EQ(res.t_null.size(), 1000u);
  EXPECT_NEAR(res.t_observed.value, 1.0, 1e-12);
}

TEST(FullTest, YhatEqualsTargetIsDetected) {
  const auto y = oracle::normal_draws(100, 4);
  auto c = oracle::normal_draws(100, 5);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] += 0.5 * y[i];
  TestConfig cfg;
  cfg.seed = 6;
  const auto res = full_confound_test(make(y, y, c), cfg);
  EXPECT_EQ(res.kind, TestKind::full);
  EXPECT_LE(res.p_value, 0.01);
}

TEST(ConfoundTest, DeterministicAndThreadIndependent) {
  SimSpec spec;
  spec.seed = 10;
  spec.w_cyhat = 0.2;
  const Triplet t = simulate_triplet(spec);
  TestConfig cfg;
  cfg.num_permutations = 200;
  cfg.seed = 77;
  for (TestKind kind : {TestKind::partial, TestKind::full}) {
    const auto a = confound_test(kind, t, cfg);
    const auto b = confound_test(kind, t, cfg);
    cfg.threads = 3;
    const auto c = confound_test(kind, t, cfg);
    cfg.threads = 1;
    EXPECT_EQ(a.p_value, b.p_value);
    EXPECT_EQ(a.t_null, b.t_null);
    EXPECT_EQ(a.t_null, c.t_null);
    EXPECT_EQ(a.t_observed.value, c.t_observed.value);
  }
}

TEST(ConfoundTest, NullStatisticsUseUnchangedYhatAndPermutedVariable) {
  SimSpec spec;
  spec.seed = 11;
  spec.n = 60;
  const Triplet t = simulate_triplet(spec);
  const std::vector<double> yhat_copy(t.yhat.values().begin(), t.yhat.values().end());
  TestConfig cfg;
  cfg.num_permutations = 50;
  cfg.seed = 5;

  const CondLogLik ll = estimate_conditional_loglik(t.y, t.c);
  const auto res = confound_test_with_density(TestKind::partial, t, ll, cfg);
  ASSERT_EQ(std::memcmp(yhat_copy.data(), t.yhat.values().data(), yhat_copy.size() * sizeof(double)), 0);
  EXPECT_EQ(res.t_null, partial_confound_test(t, cfg).t_null);

  const auto draws = draw_conditional_permutations(ll, cfg);
  const auto yhat = Variable::numerical(yhat_copy);
  for (std::size_t j = 0; j < draws.perms.size(); ++j)
    EXPECT_EQ(res.t_null[j], r2_numeric(yhat.values(), t.c.permuted(draws.perms[j]).values()).value);
  std::size_t ge = 0;
  for (double v : res.t_null) ge += v >= res.t_observed.value;
  EXPECT_EQ(res.p_value, (1.0 + ge) / 51.0);
}

TEST(ConfoundTest, FullTestPermutesTarget) {
  SimSpec spec;
  spec.seed = 12;
  spec.n = 40;
  const Triplet t = simulate_triplet(spec);
  TestConfig cfg;
  cfg.num_permutations = 30;
  const CondLogLik ll = estimate_conditional_loglik(t.c, t.y);
  const auto res = full_confound_test(t, cfg);
  const auto draws = draw_conditional_permutations(ll, cfg);
  for (std::size_t j = 0; j < draws.perms.size(); ++j)
    EXPECT_EQ(res.t_null[j], r2_numeric(t.yhat.values(), t.y.permuted(draws.perms[j]).values()).value);
}

TEST(ConfoundTest, CompanionStatisticsMatchStatsModule) {
  SimSpec spec;
  spec.seed = 13;
  spec.binarize.c = true;
  const Triplet t = simulate_triplet(spec);
  TestConfig cfg;
  cfg.num_permutations = 20;
  const auto res = partial_confound_test(t, cfg);
  EXPECT_EQ(res.r2_y_c.value, r2_anova(t.y.values(), t.c).value);
  EXPECT_EQ(res.r2_yhat_c.value, r2_anova(t.yhat.values(), t.c).value);
  EXPECT_EQ(res.r2_yhat_y.value, r2_numeric(t.yhat.values(), t.y.values()).value);
  EXPECT_EQ(res.t_observed.family, StatFamily::r2_anova);
  EXPECT_EQ(res.config_echo.num_permutations, 20u);
}

TEST(ConfoundTest, CategoricalTargetUsesPseudoR2) {
  SimSpec spec;
  spec.seed = 14;
  spec.binarize = {true, true, true};
  const Triplet t = simulate_triplet(spec);
  TestConfig cfg;
  cfg.num_permutations = 20;
  const auto res = full_confound_test(t, cfg);
  EXPECT_EQ(res.t_observed.family, StatFamily::pseudo_r2);
  EXPECT_EQ(res.t_observed.value, pseudo_r2(t.y, t.yhat).value);
}

TEST(ConfoundTest, CategoricalYhatIsMisuse) {
  const auto y = oracle::normal_draws(30, 15);
  std::vector<int> cls(30);
  for (int i = 0; i < 30; ++i) cls[i] = y[static_cast<std::size_t>(i)] > 0;
  const Triplet t = validate_triplet(Variable::numerical(y), Variable::categorical_codes(cls),
                                     Variable::numerical(oracle::normal_draws(30, 16)));
  try {
    partial_confound_test(t);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ModelMisuse);
  }
}

TEST(ConfoundTest, PaperLiteralMode) {
  const auto y = oracle::normal_draws(50, 17);
  const auto c = oracle::normal_draws(50, 18);
  TestConfig cfg;
  cfg.num_permutations = 100;
  cfg.p_value_mode = PValueMode::paper_literal;
  const auto res = partial_confound_test(make(y, c, c), cfg);
  EXPECT_EQ(res.p_value, 0.0);
}
