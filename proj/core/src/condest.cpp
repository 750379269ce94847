#include "confound/condest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace confound {

namespace {

void check_inputs(std::span<const double> conditioner, std::span<const double> response) {
  if (conditioner.size() != response.size())
    throw Error(ErrorCode::LengthMismatch, "conditioner and response lengths differ");
  if (response.size() < kMinRows)
    throw Error(ErrorCode::TooFewRows, "need at least " + std::to_string(kMinRows) + " rows");
  for (double x : conditioner)
    if (!std::isfinite(x)) throw Error(ErrorCode::NonFinite, "conditioner not finite");
  for (double x : response)
    if (!std::isfinite(x)) throw Error(ErrorCode::NonFinite, "response not finite");
}

Eigen::Map<const Eigen::VectorXd> as_vector(std::span<const double> v) {
  return {v.data(), static_cast<Eigen::Index>(v.size())};
}

}  // namespace

GamFit fit_gam(std::span<const double> conditioner, std::span<const double> response,
               const BasisSpec& spec) {
  spec.validate();
  check_inputs(conditioner, response);
  const auto [lo, hi] = std::minmax_element(conditioner.begin(), conditioner.end());
  if (*lo == *hi) throw Error(ErrorCode::DegenerateRange, "conditioner is constant");

  const auto n = static_cast<Eigen::Index>(response.size());
  const auto k = static_cast<Eigen::Index>(spec.num_basis);
  const BSplineBasis basis(*lo, *hi, spec.num_basis, spec.degree);

  Eigen::MatrixXd x(n, k + 1);
  x.col(0).setOnes();
  x.rightCols(k) = basis.design(conditioner);
  const Eigen::VectorXd c = as_vector(response);

  const Eigen::MatrixXd xtx = x.transpose() * x;
  const Eigen::VectorXd xtc = x.transpose() * c;
  const Eigen::MatrixXd d = difference_matrix(spec.num_basis, spec.penalty_order);
  const Eigen::MatrixXd dtd = d.transpose() * d;
  // The spline block contains the constant, which the intercept also spans; a
  // tiny ridge on the spline weights makes the system positive definite
  // without changing the fitted values.
  const double ridge = 1e-8 * xtx.diagonal().tail(k).mean();

  GamFit best;
  best.gcv_path.assign(spec.lambda_grid.size(), std::numeric_limits<double>::infinity());
  double best_gcv = std::numeric_limits<double>::infinity();
  bool any = false;

  for (std::size_t g = 0; g < spec.lambda_grid.size(); ++g) {
    const double lambda = spec.lambda_grid[g];
    Eigen::MatrixXd a = xtx;
    a.bottomRightCorner(k, k) += lambda * dtd;
    a.bottomRightCorner(k, k).diagonal().array() += ridge;

    const Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() != Eigen::Success) continue;
    const Eigen::VectorXd beta = llt.solve(xtc);
    const double trace = llt.solve(xtx).trace();
    const Eigen::VectorXd fitted = x * beta;
    const double rss = (c - fitted).squaredNorm();
    const double dof = static_cast<double>(n) - trace;
    if (!std::isfinite(rss) || !(dof > 1e-8)) continue;

    const double gcv = static_cast<double>(n) * rss / (dof * dof);
    best.gcv_path[g] = gcv;
    any = true;
    if (gcv < best_gcv) {
      best_gcv = gcv;
      best.coefficients = beta;
      best.lambda_selected = lambda;
      best.mu.assign(fitted.data(), fitted.data() + n);
      best.sigma = std::max(std::sqrt(rss / dof), kSigmaFloor);
      best.effective_df = trace;
      best.rss = rss;
    }
  }
  if (!any)
    throw Error(ErrorCode::SingularSystem,
                "penalised normal equations are singular for every lambda");
  best.gcv = best_gcv;
  return best;
}

GamFit fit_gam(const Variable& conditioner, std::span<const double> response,
               const BasisSpec& spec) {
  if (conditioner.is_numerical()) return fit_gam(conditioner.values(), response, spec);

  check_inputs(conditioner.values(), response);
  const std::size_t levels = conditioner.num_levels();
  const auto codes = conditioner.codes();
  std::vector<double> sums(levels, 0.0);
  std::vector<std::size_t> counts(levels, 0);
  for (std::size_t i = 0; i < response.size(); ++i) {
    sums[static_cast<std::size_t>(codes[i])] += response[i];
    ++counts[static_cast<std::size_t>(codes[i])];
  }

  GamFit fit;
  fit.coefficients = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(levels));
  std::size_t used = 0;
  for (std::size_t l = 0; l < levels; ++l) {
    if (counts[l] == 0) continue;
    ++used;
    fit.coefficients(static_cast<Eigen::Index>(l)) = sums[l] / static_cast<double>(counts[l]);
  }
  fit.mu.resize(response.size());
  double rss = 0.0;
  for (std::size_t i = 0; i < response.size(); ++i) {
    fit.mu[i] = fit.coefficients(codes[i]);
    rss += (response[i] - fit.mu[i]) * (response[i] - fit.mu[i]);
  }
  const double n = static_cast<double>(response.size());
  const double dof = n - static_cast<double>(used);
  fit.rss = rss;
  fit.effective_df = static_cast<double>(used);
  fit.sigma = dof > 0.0 ? std::max(std::sqrt(rss / dof), kSigmaFloor) : kSigmaFloor;
  if (dof > 0.0) fit.gcv = n * rss / (dof * dof);
  return fit;
}

GamFit fit_linear_baseline(std::span<const double> conditioner,
                           std::span<const double> response) {
  check_inputs(conditioner, response);
  const auto n = static_cast<double>(response.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < response.size(); ++i) {
    mx += conditioner[i];
    my += response[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < response.size(); ++i) {
    sxx += (conditioner[i] - mx) * (conditioner[i] - mx);
    sxy += (conditioner[i] - mx) * (response[i] - my);
  }
  if (!(sxx > 0.0)) throw Error(ErrorCode::DegenerateRange, "conditioner is constant");

  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  GamFit fit;
  fit.coefficients = Eigen::Vector2d(intercept, slope);
  fit.mu.resize(response.size());
  double rss = 0.0;
  for (std::size_t i = 0; i < response.size(); ++i) {
    fit.mu[i] = intercept + slope * conditioner[i];
    rss += (response[i] - fit.mu[i]) * (response[i] - fit.mu[i]);
  }
  fit.rss = rss;
  fit.effective_df = 2.0;
  fit.sigma = std::max(std::sqrt(rss / (n - 2.0)), kSigmaFloor);
  return fit;
}

bool CondLogLik::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

CondLogLik gaussian_loglik_matrix(const GamFit& fit, std::span<const double> response) {
  const std::size_t n = response.size();
  if (fit.mu.size() != n)
    throw Error(ErrorCode::LengthMismatch, "fit and response lengths differ");
  const double sigma = std::max(fit.sigma, kSigmaFloor);
  const double offset = -std::log(sigma) - 0.5 * std::log(2.0 * std::numbers::pi);
  const double inv_sigma = 1.0 / sigma;

  CondLogLik ll(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double z = (response[i] - fit.mu[j]) * inv_sigma;
      ll(i, j) = -0.5 * z * z + offset;
    }
  }
  return ll;
}

CondLogLik mnlogit_loglik_matrix(const MnlogitFit& fit, const Variable& response) {
  if (!response.is_categorical())
    throw Error(ErrorCode::InvalidArgument, "mnlogit log-likelihood needs a categorical response");
  const std::size_t n = response.size();
  if (static_cast<std::size_t>(fit.log_probs.rows()) != n)
    throw Error(ErrorCode::LengthMismatch, "fit and response lengths differ");
  const auto codes = response.codes();
  CondLogLik ll(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto cls = static_cast<Eigen::Index>(codes[i]);
    for (std::size_t j = 0; j < n; ++j) ll(i, j) = fit.log_probs(static_cast<Eigen::Index>(j), cls);
  }
  return ll;
}

CondLogLik estimate_conditional_loglik(const Variable& conditioner, const Variable& response,
                                       DensityModel model, const BasisSpec& spec) {
  if (response.is_categorical())
    return mnlogit_loglik_matrix(fit_mnlogit(conditioner, response), response);

  const auto values = response.values();
  if (model == DensityModel::linear && conditioner.is_numerical())
    return gaussian_loglik_matrix(fit_linear_baseline(conditioner.values(), values), values);
  return gaussian_loglik_matrix(fit_gam(conditioner, values, spec), values);
}

}  // namespace confound
