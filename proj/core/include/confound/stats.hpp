#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "confound/core.hpp"

namespace confound {

enum class StatFamily { r2_numeric, r2_anova, pseudo_r2 };
std::string_view to_string(StatFamily family) noexcept;

struct StatValue {
  double value = 0.0;
  StatFamily family = StatFamily::r2_numeric;
};

/// Squared Pearson correlation.
StatValue r2_numeric(std::span<const double> a, std::span<const double> b);

/// 1 - SS_within / SS_total of `numeric` grouped by the levels of `categorical`.
StatValue r2_anova(std::span<const double> numeric, const Variable& categorical);

/// McFadden pseudo-R^2 of an mnlogit of `target` on `predictor`, clamped to [0, 1].
StatValue pseudo_r2(const Variable& target, const Variable& predictor);

/// What the second argument of test_statistic stands for. A categorical
/// target is scored with pseudo-R^2, a categorical confounder with ANOVA R^2.
enum class OtherRole { confounder, target };

StatValue test_statistic(const Variable& yhat, const Variable& other,
                         OtherRole role = OtherRole::confounder);

/// R^2-family association between two arbitrary columns: Pearson for two
/// numerical ones, ANOVA for mixed kinds, pseudo-R^2 of `a` on `b` when both
/// are categorical. Same as test_statistic(a, b, OtherRole::confounder).
StatValue association_r2(const Variable& a, const Variable& b);

double permutation_p_value(double t_observed, std::span<const double> t_null,
                           PValueMode mode = PValueMode::inclusive);

/// Average ranks (1-based) with ties sharing the mean of their positions.
std::vector<double> average_ranks(std::span<const double> x);

struct CorrelationTest {
  double r = 0.0;
  double p = 1.0;
};

/// Rank-based partial correlation of x and y given z, with a two-sided
/// t-test on n - 3 degrees of freedom.
CorrelationTest partial_spearman(std::span<const double> x, std::span<const double> y,
                                 std::span<const double> z);

struct PermTestResult {
  StatValue r2;
  double p = 1.0;
};

/// Plain permutation test of test_statistic(a, b, role), permuting b uniformly.
PermTestResult unconditional_perm_test(const Variable& a, const Variable& b, std::size_t m,
                                       std::uint64_t seed, OtherRole role = OtherRole::confounder);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// One-sample Kolmogorov-Smirnov test against Uniform(0, 1), with the
/// asymptotic Kolmogorov tail (Stephens' small-sample correction).
KsResult ks_uniform(std::span<const double> sample);

}  // namespace confound
