#include "confound/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

#include "confound/condest.hpp"
#include "confound/rng.hpp"

namespace confound {

std::string_view to_string(StatFamily family) noexcept {
  switch (family) {
    case StatFamily::r2_numeric: return "r2_numeric";
    case StatFamily::r2_anova: return "r2_anova";
    case StatFamily::pseudo_r2: return "pseudo_r2";
  }
  return "unknown";
}

namespace {

double mean_of(std::span<const double> x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::LengthMismatch, "vector lengths differ");
  if (a.size() < 2) throw Error(ErrorCode::TooFewRows, "need at least two observations");
  const double ma = mean_of(a);
  const double mb = mean_of(b);
  double saa = 0.0, sbb = 0.0, sab = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    saa += da * da;
    sbb += db * db;
    sab += da * db;
  }
  if (!(saa > 0.0) || !(sbb > 0.0))
    throw Error(ErrorCode::DegenerateVariable, "correlation of a constant vector");
  return sab / std::sqrt(saa * sbb);
}

}  // namespace

StatValue r2_numeric(std::span<const double> a, std::span<const double> b) {
  const double r = pearson(a, b);
  return {std::min(r * r, 1.0), StatFamily::r2_numeric};
}

StatValue r2_anova(std::span<const double> numeric, const Variable& categorical) {
  if (!categorical.is_categorical())
    throw Error(ErrorCode::InvalidArgument, "r2_anova needs a categorical grouping");
  if (numeric.size() != categorical.size())
    throw Error(ErrorCode::LengthMismatch, "vector lengths differ");
  if (categorical.num_levels() < 2)
    throw Error(ErrorCode::DegenerateVariable, "grouping has a single level");

  const std::size_t levels = categorical.num_levels();
  const auto codes = categorical.codes();
  std::vector<double> sums(levels, 0.0);
  std::vector<double> counts(levels, 0.0);
  for (std::size_t i = 0; i < numeric.size(); ++i) {
    sums[static_cast<std::size_t>(codes[i])] += numeric[i];
    counts[static_cast<std::size_t>(codes[i])] += 1.0;
  }
  const double grand = mean_of(numeric);
  double ss_total = 0.0, ss_within = 0.0;
  for (std::size_t i = 0; i < numeric.size(); ++i) {
    const auto l = static_cast<std::size_t>(codes[i]);
    const double group_mean = sums[l] / counts[l];
    ss_total += (numeric[i] - grand) * (numeric[i] - grand);
    ss_within += (numeric[i] - group_mean) * (numeric[i] - group_mean);
  }
  if (!(ss_total > 0.0)) throw Error(ErrorCode::DegenerateVariable, "numeric input is constant");
  return {std::clamp(1.0 - ss_within / ss_total, 0.0, 1.0), StatFamily::r2_anova};
}

StatValue pseudo_r2(const Variable& target, const Variable& predictor) {
  if (!target.is_categorical())
    throw Error(ErrorCode::InvalidArgument, "pseudo_r2 needs a categorical target");
  if (target.num_levels() < 2)
    throw Error(ErrorCode::DegenerateVariable, "target has a single level");
  if (target.size() != predictor.size())
    throw Error(ErrorCode::LengthMismatch, "vector lengths differ");

  std::vector<double> counts(target.num_levels(), 0.0);
  for (int code : target.codes()) counts[static_cast<std::size_t>(code)] += 1.0;
  const double n = static_cast<double>(target.size());
  double null_ll = 0.0;
  for (double count : counts)
    if (count > 0.0) null_ll += count * std::log(count / n);

  const MnlogitFit fit = fit_mnlogit(predictor, target);
  if (fit.num_predictors == 0 || null_ll == 0.0) return {0.0, StatFamily::pseudo_r2};
  return {std::clamp(1.0 - fit.log_likelihood / null_ll, 0.0, 1.0), StatFamily::pseudo_r2};
}

StatValue test_statistic(const Variable& yhat, const Variable& other, OtherRole role) {
  if (yhat.is_numerical() && other.is_numerical()) return r2_numeric(yhat.values(), other.values());
  if (other.is_categorical() && role == OtherRole::target) return pseudo_r2(other, yhat);
  if (yhat.is_numerical()) return r2_anova(yhat.values(), other);
  if (other.is_numerical()) return r2_anova(other.values(), yhat);
  return pseudo_r2(yhat, other);
}

StatValue association_r2(const Variable& a, const Variable& b) {
  return test_statistic(a, b, OtherRole::confounder);
}

double permutation_p_value(double t_observed, std::span<const double> t_null, PValueMode mode) {
  if (t_null.empty()) throw Error(ErrorCode::InvalidArgument, "empty null distribution");
  const auto exceed = static_cast<double>(
      std::count_if(t_null.begin(), t_null.end(), [&](double t) { return t >= t_observed; }));
  const auto m = static_cast<double>(t_null.size());
  return mode == PValueMode::inclusive ? (1.0 + exceed) / (m + 1.0) : exceed / m;
}

std::vector<double> average_ranks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  for (std::size_t start = 0; start < order.size();) {
    std::size_t end = start + 1;
    while (end < order.size() && x[order[end]] == x[order[start]]) ++end;
    const double rank = 0.5 * static_cast<double>(start + end - 1) + 1.0;
    for (std::size_t k = start; k < end; ++k) ranks[order[k]] = rank;
    start = end;
  }
  return ranks;
}

CorrelationTest partial_spearman(std::span<const double> x, std::span<const double> y,
                                 std::span<const double> z) {
  if (x.size() != y.size() || x.size() != z.size())
    throw Error(ErrorCode::LengthMismatch, "vector lengths differ");
  if (x.size() < 4) throw Error(ErrorCode::TooFewRows, "partial Spearman needs n >= 4");

  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const auto rz = average_ranks(z);
  const double rxy = pearson(rx, ry);
  const double rxz = pearson(rx, rz);
  const double ryz = pearson(ry, rz);
  const double dx = 1.0 - rxz * rxz;
  const double dy = 1.0 - ryz * ryz;
  if (dx < 1e-12 || dy < 1e-12)
    throw Error(ErrorCode::NumericalInstability, "conditioning variable is collinear with an argument");

  const double r = std::clamp((rxy - rxz * ryz) / std::sqrt(dx * dy), -1.0, 1.0);
  const double df = static_cast<double>(x.size()) - 3.0;
  CorrelationTest out;
  out.r = r;
  if (1.0 - r * r <= 0.0) {
    out.p = 0.0;
    return out;
  }
  const double t = r * std::sqrt(df / (1.0 - r * r));
  const boost::math::students_t dist(df);
  out.p = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))));
  return out;
}

PermTestResult unconditional_perm_test(const Variable& a, const Variable& b, std::size_t m,
                                       std::uint64_t seed, OtherRole role) {
  if (m < 1) throw Error(ErrorCode::InvalidArgument, "need at least one permutation");
  if (a.size() != b.size()) throw Error(ErrorCode::LengthMismatch, "vector lengths differ");
  PermTestResult out;
  out.r2 = test_statistic(a, b, role);

  Rng rng(seed);
  std::vector<std::size_t> perm(b.size());
  std::vector<double> null(m);
  for (std::size_t j = 0; j < m; ++j) {
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    rng.shuffle(std::span<std::size_t>(perm));
    null[j] = test_statistic(a, b.permuted(perm), role).value;
  }
  out.p = permutation_p_value(out.r2.value, null, PValueMode::inclusive);
  return out;
}

KsResult ks_uniform(std::span<const double> sample) {
  if (sample.empty()) throw Error(ErrorCode::InvalidArgument, "empty sample");
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double u = std::clamp(sorted[i], 0.0, 1.0);
    d = std::max({d, static_cast<double>(i + 1) / n - u, u - static_cast<double>(i) / n});
  }
  const double root = std::sqrt(n);
  const double lambda = (root + 0.12 + 0.11 / root) * d;

  double tail = 0.0;
  if (lambda < 1e-3) {
    tail = 1.0;
  } else {
    for (int k = 1; k <= 100; ++k) {
      const double term = std::exp(-2.0 * k * k * lambda * lambda);
      tail += (k % 2 == 1 ? 2.0 : -2.0) * term;
      if (term < 1e-16) break;
    }
  }
  return {d, std::clamp(tail, 0.0, 1.0)};
}

}  // namespace confound
