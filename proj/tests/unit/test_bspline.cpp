#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "confound/bspline.hpp"
#include "confound/core.hpp"
#include "oracles.hpp"

using namespace confound;

namespace {

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = a + (b - a) * static_cast<double>(i) / (n - 1);
  v.back() = b;
  return v;
}

}  // namespace

TEST(BSpline, PartitionOfUnity) {
  std::vector<double> x;
  for (double v : linspace(0.0, 1.0, 37)) {
    x.push_back(v);
    x.push_back(v);
  }
  for (std::size_t k : {6u, 12u, 20u}) {
    BasisSpec spec;
    spec.num_basis = k;
    const Eigen::MatrixXd b = bspline_basis(x, spec);
    for (Eigen::Index i = 0; i < b.rows(); ++i) EXPECT_NEAR(b.row(i).sum(), 1.0, 1e-10);
  }
}

TEST(BSpline, LocalSupportAndShape) {
  const auto x = linspace(0.0, 1.0, 50);
  BasisSpec spec;
  const Eigen::MatrixXd b = bspline_basis(x, spec);
  ASSERT_EQ(b.rows(), 50);
  ASSERT_EQ(b.cols(), 20);
  for (Eigen::Index i = 0; i < b.rows(); ++i) {
    int nonzero = 0;
    for (Eigen::Index j = 0; j < b.cols(); ++j) nonzero += b(i, j) != 0.0;
    EXPECT_LE(nonzero, 4) << "row " << i;
  }
}

TEST(BSpline, MatchesTextbookRecursion) {
  const double lo = -1.3, hi = 2.1;
  const BSplineBasis basis(lo, hi, 20, 3);
  const std::vector<double> t = oracle::clamped_uniform_knots(lo, hi, 20, 3);
  ASSERT_EQ(t.size(), 24u);
  const auto x = linspace(lo, hi, 101);
  const Eigen::MatrixXd d = basis.design(x);
  for (std::size_t r = 0; r < x.size(); ++r)
    for (std::size_t j = 0; j < 20; ++j)
      EXPECT_NEAR(d(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)),
                  oracle::bspline_value(t, j, 3, x[r]), 1e-12)
          << "x=" << x[r] << " j=" << j;
}

TEST(BSpline, OutOfRangeClamps) {
  const BSplineBasis basis(0.0, 1.0, 10, 3);
  const Eigen::MatrixXd below = basis.design(std::vector<double>{-5.0, 0.0});
  const Eigen::MatrixXd above = basis.design(std::vector<double>{7.0, 1.0});
  EXPECT_TRUE(below.row(0).isApprox(below.row(1)));
  EXPECT_TRUE(above.row(0).isApprox(above.row(1)));
}

TEST(BSpline, ConstantInputIsDegenerateRange) {
  const std::vector<double> x(30, 0.25);
  try {
    bspline_basis(x, BasisSpec{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateRange);
  }
}

TEST(BSpline, DifferenceMatrixAnnihilatesPolynomials) {
  const Eigen::MatrixXd d2 = difference_matrix(10, 2);
  ASSERT_EQ(d2.rows(), 8);
  ASSERT_EQ(d2.cols(), 10);
  Eigen::VectorXd linear(10);
  for (int i = 0; i < 10; ++i) linear(i) = 3.0 - 0.5 * i;
  EXPECT_LT((d2 * linear).norm(), 1e-12);
  Eigen::VectorXd quad(10);
  for (int i = 0; i < 10; ++i) quad(i) = i * i;
  EXPECT_NEAR((d2 * quad)(0), 2.0, 1e-12);
}

TEST(BasisSpec, DefaultGridAndValidation) {
  const auto grid = BasisSpec::default_lambda_grid();
  ASSERT_EQ(grid.size(), 11u);
  EXPECT_NEAR(grid.front(), 1e-3, 1e-15);
  EXPECT_NEAR(grid.back(), 1e3, 1e-9);
  for (std::size_t k = 1; k < grid.size(); ++k) EXPECT_NEAR(grid[k] / grid[k - 1], std::pow(10.0, 0.6), 1e-9);
  BasisSpec bad;
  bad.num_basis = 4;
  EXPECT_THROW(bad.validate(), Error);
  bad = BasisSpec{};
  bad.lambda_grid = {1.0, -1.0};
  EXPECT_THROW(bad.validate(), Error);
  bad.lambda_grid = {};
  EXPECT_THROW(bad.validate(), Error);
}
