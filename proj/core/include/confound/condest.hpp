#pragma once

// Conditional density estimation. A fitted model of response | conditioner is
// materialised as an n x n matrix of log-likelihoods
//
//   entry(i, j) = log q(response_i | conditioner_j)
//
// which is all the permutation sampler needs.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "confound/bspline.hpp"
#include "confound/core.hpp"

namespace confound {

inline constexpr double kSigmaFloor = 1e-8;

struct GamFit {
  /// Intercept followed by the spline weights. For a categorical conditioner
  /// these are the per-level means instead.
  Eigen::VectorXd coefficients;
  double lambda_selected = 0.0;
  /// Fitted conditional mean at each observation's conditioner value.
  std::vector<double> mu;
  double sigma = kSigmaFloor;
  /// Unset for the linear baseline.
  std::optional<double> gcv;
  /// GCV score per entry of the lambda grid (+inf where the fit was unusable).
  std::vector<double> gcv_path;
  double effective_df = 0.0;
  double rss = 0.0;
};

/// Penalised B-spline regression of response on a numerical conditioner;
/// the smoothing penalty is chosen from spec.lambda_grid by minimal GCV.
GamFit fit_gam(std::span<const double> conditioner, std::span<const double> response,
               const BasisSpec& spec = {});

/// Dispatches on the conditioner kind. A categorical conditioner yields the
/// group-means model with pooled residual deviation.
GamFit fit_gam(const Variable& conditioner, std::span<const double> response,
               const BasisSpec& spec = {});

/// Ordinary least squares response = a + b * conditioner.
GamFit fit_linear_baseline(std::span<const double> conditioner,
                           std::span<const double> response);

struct MnlogitFit {
  /// (K-1) x (d+1); row k holds [intercept, slopes] of class k+1 against class 0.
  Eigen::MatrixXd weights;
  /// n x K fitted class log-probabilities.
  Eigen::MatrixXd log_probs;
  std::size_t iterations = 0;
  /// Unpenalised log-likelihood at the fitted weights.
  double log_likelihood = 0.0;
  /// Number of non-intercept predictors.
  std::size_t num_predictors = 0;
};

/// Ridge-penalised multinomial logistic regression fitted by Newton's method.
/// A numerical conditioner enters as one standardised column, a categorical one
/// as indicator columns with the first level dropped. Constant conditioners
/// give the intercept-only model.
MnlogitFit fit_mnlogit(const Variable& conditioner, const Variable& response,
                       double ridge = 1e-6);

class CondLogLik {
 public:
  CondLogLik() = default;
  explicit CondLogLik(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t response, std::size_t conditioner) const noexcept {
    return data_[response * n_ + conditioner];
  }
  double& operator()(std::size_t response, std::size_t conditioner) noexcept {
    return data_[response * n_ + conditioner];
  }
  std::span<const double> row(std::size_t response) const noexcept {
    return {data_.data() + response * n_, n_};
  }

  bool all_finite() const noexcept;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

CondLogLik gaussian_loglik_matrix(const GamFit& fit, std::span<const double> response);

CondLogLik mnlogit_loglik_matrix(const MnlogitFit& fit, const Variable& response);

/// Fits the model appropriate for the variable kinds and returns its
/// log-likelihood matrix: GAM (or OLS for DensityModel::linear) for a numerical
/// response, mnlogit for a categorical one.
CondLogLik estimate_conditional_loglik(const Variable& conditioner, const Variable& response,
                                       DensityModel model = DensityModel::gam,
                                       const BasisSpec& spec = {});

}  // namespace confound
