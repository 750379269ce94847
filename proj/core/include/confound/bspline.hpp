#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace confound {

struct BasisSpec {
  std::size_t num_basis = 20;
  std::size_t degree = 3;
  std::size_t penalty_order = 2;
  std::vector<double> lambda_grid = default_lambda_grid();

  /// 11 log-spaced values over [1e-3, 1e3].
  static std::vector<double> default_lambda_grid();

  void validate() const;
};

/// Clamped B-spline basis with uniformly spaced knots over [lo, hi].
/// Evaluation outside the range is clamped to the nearest endpoint.
class BSplineBasis {
 public:
  BSplineBasis(double lo, double hi, std::size_t num_basis, std::size_t degree);

  std::size_t num_basis() const noexcept { return num_basis_; }
  std::size_t degree() const noexcept { return degree_; }
  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }
  const std::vector<double>& knots() const noexcept { return knots_; }

  /// Writes the degree+1 non-zero basis values at x into `values` and
  /// returns the index of the first of them.
  std::size_t evaluate(double x, std::span<double> values) const;

  /// Dense n x num_basis design matrix.
  Eigen::MatrixXd design(std::span<const double> x) const;

 private:
  double lo_;
  double hi_;
  std::size_t num_basis_;
  std::size_t degree_;
  std::vector<double> knots_;
};

/// Design matrix of the basis spanning [min(x), max(x)]. Throws
/// DegenerateRange when x is constant.
Eigen::MatrixXd bspline_basis(std::span<const double> x, const BasisSpec& spec);

/// Finite-difference operator of the given order on `size` coefficients.
Eigen::MatrixXd difference_matrix(std::size_t size, std::size_t order);

}  // namespace confound
