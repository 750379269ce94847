#include "confound/bspline.hpp"

#include <algorithm>
#include <cmath>

#include "confound/core.hpp"

namespace confound {

std::vector<double> BasisSpec::default_lambda_grid() {
  std::vector<double> grid;
  grid.reserve(11);
  for (int k = 0; k < 11; ++k) grid.push_back(std::pow(10.0, -3.0 + 0.6 * k));
  return grid;
}

void BasisSpec::validate() const {
  if (num_basis <= degree + 1)
    throw Error(ErrorCode::InvalidArgument, "num_basis must exceed degree + 1");
  if (penalty_order >= num_basis)
    throw Error(ErrorCode::InvalidArgument, "penalty_order must be below num_basis");
  if (lambda_grid.empty())
    throw Error(ErrorCode::InvalidArgument, "lambda_grid must not be empty");
  for (double lambda : lambda_grid) {
    if (!(lambda > 0.0) || !std::isfinite(lambda))
      throw Error(ErrorCode::InvalidArgument, "lambda_grid values must be positive");
  }
}

BSplineBasis::BSplineBasis(double lo, double hi, std::size_t num_basis, std::size_t degree)
    : lo_(lo), hi_(hi), num_basis_(num_basis), degree_(degree) {
  if (!(hi > lo)) throw Error(ErrorCode::DegenerateRange, "knot range is empty");
  if (num_basis <= degree + 1)
    throw Error(ErrorCode::InvalidArgument, "num_basis must exceed degree + 1");

  const std::size_t intervals = num_basis - degree;
  const double width = (hi - lo) / static_cast<double>(intervals);
  knots_.reserve(num_basis + degree + 1);
  for (std::size_t k = 0; k < degree; ++k) knots_.push_back(lo);
  for (std::size_t k = 0; k <= intervals; ++k)
    knots_.push_back(k == intervals ? hi : lo + width * static_cast<double>(k));
  for (std::size_t k = 0; k < degree; ++k) knots_.push_back(hi);
}

std::size_t BSplineBasis::evaluate(double x, std::span<double> values) const {
  const std::size_t p = degree_;
  x = std::clamp(x, lo_, hi_);

  // Knot span s with knots[s] <= x < knots[s + 1], restricted to [p, num_basis - 1].
  const auto first = knots_.begin() + static_cast<std::ptrdiff_t>(p);
  const auto last = knots_.begin() + static_cast<std::ptrdiff_t>(num_basis_);
  auto it = std::upper_bound(first, last + 1, x);
  std::size_t span = static_cast<std::size_t>(it - knots_.begin()) - 1;
  span = std::clamp(span, p, num_basis_ - 1);

  // Cox-de Boor triangle for the p+1 non-vanishing functions.
  std::vector<double> left(p + 1), right(p + 1);
  values[0] = 1.0;
  for (std::size_t j = 1; j <= p; ++j) {
    left[j] = x - knots_[span + 1 - j];
    right[j] = knots_[span + j] - x;
    double saved = 0.0;
    for (std::size_t r = 0; r < j; ++r) {
      const double denom = right[r + 1] + left[j - r];
      const double temp = denom > 0.0 ? values[r] / denom : 0.0;
      values[r] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    values[j] = saved;
  }
  return span - p;
}

Eigen::MatrixXd BSplineBasis::design(std::span<const double> x) const {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(x.size()),
                                              static_cast<Eigen::Index>(num_basis_));
  std::vector<double> local(degree_ + 1);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const std::size_t start = evaluate(x[i], local);
    for (std::size_t k = 0; k <= degree_; ++k)
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(start + k)) = local[k];
  }
  return out;
}

Eigen::MatrixXd bspline_basis(std::span<const double> x, const BasisSpec& spec) {
  if (x.empty()) throw Error(ErrorCode::DegenerateRange, "empty input");
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  if (*lo == *hi) throw Error(ErrorCode::DegenerateRange, "constant input has no range");
  return BSplineBasis(*lo, *hi, spec.num_basis, spec.degree).design(x);
}

Eigen::MatrixXd difference_matrix(std::size_t size, std::size_t order) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(size),
                                                 static_cast<Eigen::Index>(size));
  for (std::size_t k = 0; k < order; ++k) {
    const Eigen::Index rows = d.rows() - 1;
    d = (d.bottomRows(rows) - d.topRows(rows)).eval();
  }
  return d;
}

}  // namespace confound
