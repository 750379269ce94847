#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "confound/simlab.hpp"
#include "confound/stats.hpp"
#include "oracles.hpp"

using namespace confound;

TEST(SinhArcsinh, IdentityAndOrigin) {
  const auto x = oracle::normal_draws(1000, 1);
  const auto same = sinh_arcsinh(x, 1.0, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(same[i], x[i], 1e-12 * (1 + std::abs(x[i])));
  for (double d : {0.1, 0.5, 2.0, 3.0}) EXPECT_EQ(sinh_arcsinh(std::vector<double>{0.0}, d, 0.0)[0], 0.0);
}

TEST(SinhArcsinh, StrictlyMonotone) {
  auto x = oracle::normal_draws(2000, 2);
  std::sort(x.begin(), x.end());
  x.erase(std::unique(x.begin(), x.end()), x.end());
  for (auto [d, e] : {std::pair{0.1, 2.0}, std::pair{1.7, -0.5}, std::pair{0.6, 0.0}}) {
    const auto out = sinh_arcsinh(x, d, e);
    for (std::size_t i = 1; i < out.size(); ++i) ASSERT_LT(out[i - 1], out[i]);
  }
}

TEST(SinhArcsinh, SkewAndKurtosisAtComparisonSetting) {
  const auto x = oracle::normal_draws(1000000, 3);
  const auto out = sinh_arcsinh(x, 0.1, 2.0);
  // Negatively skewed and platykurtic: small delta compresses the tails.
  EXPECT_NEAR(oracle::skewness(out), -0.13, 0.02);
  EXPECT_NEAR(oracle::excess_kurtosis(out), -0.83, 0.03);
  // delta > 1 gives heavy tails instead.
  EXPECT_GT(oracle::excess_kurtosis(sinh_arcsinh(x, 1.5, 0.0)), 0.0);
}

TEST(SimulateTriplet, DeterministicAndValid) {
  SimSpec spec;
  spec.seed = 4;
  spec.n = 10;
  const Triplet a = simulate_triplet(spec);
  EXPECT_EQ(a, simulate_triplet(spec));
  EXPECT_EQ(a, validate_triplet(a.y, a.yhat, a.c));
  spec.seed = 5;
  EXPECT_NE(a, simulate_triplet(spec));
}

TEST(SimulateTriplet, BinarizedVariablesAreBalanced) {
  SimSpec spec;
  spec.n = 10000;
  spec.binarize = {true, true, true};
  spec.seed = 6;
  const Triplet t = simulate_triplet(spec);
  EXPECT_TRUE(t.y.is_categorical());
  EXPECT_TRUE(t.c.is_categorical());
  EXPECT_TRUE(t.yhat.is_numerical());
  auto frac_ones = [](std::span<const double> v, bool codes_are_labels, const Variable& var) {
    double s = 0;
    for (std::size_t i = 0; i < v.size(); ++i)
      s += codes_are_labels ? (var.labels()[static_cast<std::size_t>(v[i])] == "1") : v[i];
    return s / v.size();
  };
  EXPECT_NEAR(frac_ones(t.y.values(), true, t.y), 0.5, 0.03);
  EXPECT_NEAR(frac_ones(t.c.values(), true, t.c), 0.5, 0.03);
  EXPECT_NEAR(frac_ones(t.yhat.values(), false, t.yhat), 0.5, 0.03);
  for (double v : t.yhat.values()) EXPECT_TRUE(v == 0.0 || v == 1.0);
}

TEST(SimulateTriplet, BinarizedTargetLeavesWithinClassDependence) {
  SimSpec spec;
  spec.n = 20000;
  spec.w_yc = spec.w_yyhat = 2.0;
  spec.binarize.y = true;
  spec.seed = 12;
  const Triplet t = simulate_triplet(spec);
  // Both still depend on the latent y inside each observed class.
  for (int cls = 0; cls < 2; ++cls) {
    std::vector<double> a, b;
    for (std::size_t i = 0; i < t.n(); ++i)
      if (t.y.codes()[i] == cls) {
        a.push_back(t.yhat.values()[i]);
        b.push_back(t.c.values()[i]);
      }
    EXPECT_NEAR(r2_numeric(a, b).value, 0.35, 0.03);
  }
  EXPECT_GT(r2_anova(t.c.values(), t.y).value, 0.5);
}

TEST(SimulateTriplet, ZeroWeightsGiveIndependence) {
  SimSpec spec;
  spec.n = 10000;
  spec.w_yc = spec.w_yyhat = spec.w_cyhat = 0.0;
  spec.seed = 7;
  const Triplet t = simulate_triplet(spec);
  EXPECT_LT(r2_numeric(t.y.values(), t.c.values()).value, 0.01);
  EXPECT_LT(r2_numeric(t.y.values(), t.yhat.values()).value, 0.01);
  EXPECT_LT(r2_numeric(t.c.values(), t.yhat.values()).value, 0.01);
}

TEST(SimulateTriplet, ConfounderWeightExplainsAboutFourPercent) {
  SimSpec spec;
  spec.n = 100000;
  spec.w_cyhat = 0.2;
  spec.seed = 8;
  const Triplet t = simulate_triplet(spec);
  // Partial R^2 of c in yhat ~ y + c.
  const auto n = static_cast<Eigen::Index>(spec.n);
  Eigen::MatrixXd full(n, 3), reduced(n, 2);
  Eigen::VectorXd yhat(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    full.row(i) << 1.0, t.y.values()[k], t.c.values()[k];
    reduced.row(i) << 1.0, t.y.values()[k];
    yhat(i) = t.yhat.values()[k];
  }
  const double rss_full = (yhat - full * full.colPivHouseholderQr().solve(yhat)).squaredNorm();
  const double rss_red = (yhat - reduced * reduced.colPivHouseholderQr().solve(yhat)).squaredNorm();
  EXPECT_NEAR((rss_red - rss_full) / rss_red, 0.04, 0.02);
}

TEST(SimulateTriplet, ValidationRejectsBadSpecs) {
  SimSpec spec;
  spec.n = 5;
  EXPECT_THROW(simulate_triplet(spec), Error);
  spec.n = 50;
  spec.delta = 0.0;
  EXPECT_THROW(simulate_triplet(spec), Error);
}

TEST(ClopperPearson, CaptionValuesAndOracle) {
  EXPECT_NEAR(clopper_pearson_upper(50, 1000), 0.065, 0.002);
  EXPECT_NEAR(clopper_pearson_upper(5, 100), 0.11, 0.005);
  EXPECT_EQ(clopper_pearson_upper(100, 100), 1.0);
  for (auto [k, n] : {std::pair<std::size_t, std::size_t>{0, 10}, {5, 100}, {50, 1000}, {3, 7}, {99, 100}})
    EXPECT_NEAR(clopper_pearson_upper(k, n), oracle::clopper_pearson_upper_bisect(k, n, 0.95), 1e-9)
        << k << "/" << n;
  EXPECT_NEAR(clopper_pearson_upper(5, 100, 0.9), oracle::clopper_pearson_upper_bisect(5, 100, 0.9), 1e-9);
}

TEST(Seeds, CellSeedDependsOnEveryField) {
  const SimSpec base;
  const std::uint64_t s0 = cell_seed(base);
  auto differs = [&](auto mutate) {
    SimSpec s = base;
    mutate(s);
    return cell_seed(s) != s0;
  };
  EXPECT_TRUE(differs([](SimSpec& s) { s.n = 101; }));
  EXPECT_TRUE(differs([](SimSpec& s) { s.w_yc = 2; }));
  EXPECT_TRUE(differs([](SimSpec& s) { s.w_yyhat = 2; }));
  EXPECT_TRUE(differs([](SimSpec& s) { s.w_cyhat = 0.2; }));
  EXPECT_TRUE(differs([](SimSpec& s) { s.delta = 0.5; }));
  EXPECT_TRUE(differs([](SimSpec& s) { s.epsilon = 1; }));
  EXPECT_TRUE(differs([](SimSpec& s) { s.link = Link::sigmoid; }));
  EXPECT_TRUE(differs([](SimSpec& s) { s.binarize.c = true; }));
  EXPECT_TRUE(differs([](SimSpec& s) { s.seed = 1; }));
  EXPECT_NE(rep_seed(s0, 0), rep_seed(s0, 1));
}

TEST(RunGrid, SingleRepGivesBernoulliRate) {
  SimSpec spec;
  spec.n = 50;
  TestConfig cfg;
  cfg.num_permutations = 50;
  const auto grid = run_grid(std::vector<SimSpec>{spec}, 1, TestKind::partial, cfg);
  ASSERT_EQ(grid.cells.size(), 1u);
  EXPECT_TRUE(grid.cells[0].positive_rate == 0.0 || grid.cells[0].positive_rate == 1.0);
  EXPECT_EQ(grid.cells[0].reps, 1u);
  EXPECT_FALSE(grid.cells[0].failure.has_value());
}

TEST(RunGrid, DeterministicAcrossThreadCountsAndOrder) {
  SimSpec base;
  base.n = 30;
  const std::vector<std::size_t> ns = {30};
  const std::vector<double> w1 = {0.5, 2.0}, w3 = {0.0, 0.6};
  const auto specs = expand_grid(ns, w1, w1, w3, base);
  ASSERT_EQ(specs.size(), 8u);
  TestConfig cfg;
  cfg.num_permutations = 40;
  cfg.mcmc_steps = 10;
  const auto serial = run_grid(specs, 6, TestKind::partial, cfg);
  cfg.threads = 4;
  const auto parallel = run_grid(specs, 6, TestKind::partial, cfg);
  std::vector<SimSpec> reversed(specs.rbegin(), specs.rend());
  const auto backwards = run_grid(reversed, 6, TestKind::partial, cfg);
  for (std::size_t k = 0; k < specs.size(); ++k) {
    EXPECT_EQ(serial.cells[k].positive_rate, parallel.cells[k].positive_rate);
    EXPECT_EQ(serial.cells[k].positive_rate, backwards.cells[specs.size() - 1 - k].positive_rate);
    EXPECT_NEAR(serial.cells[k].ci_upper, clopper_pearson_upper(0, 6), 1e-15);
  }
  std::ostringstream a, b;
  write_grid_table(a, serial);
  write_grid_table(b, parallel);
  const std::string table = a.str();
  EXPECT_EQ(table, b.str());
  EXPECT_EQ(std::count(table.begin(), table.end(), '\n'), 9);
}

TEST(RunGrid, FailuresAreReportedNotDropped) {
  SimSpec spec;
  spec.n = 12;
  spec.w_yc = 1e300;  // makes the conditional fit blow up
  spec.w_yyhat = 0.0;
  TestConfig cfg;
  cfg.num_permutations = 10;
  const auto grid = run_grid(std::vector<SimSpec>{spec}, 2, TestKind::partial, cfg);
  ASSERT_EQ(grid.cells.size(), 1u);
  std::ostringstream os;
  write_grid_table(os, grid);
  ASSERT_TRUE(grid.cells[0].failure.has_value());
  EXPECT_NE(os.str().find("failed"), std::string::npos);
}

TEST(ExpandGrid, RowMajorOrder) {
  const std::vector<std::size_t> ns = {50, 100};
  const std::vector<double> a = {1, 2}, b = {3}, c = {0, 0.4};
  const auto specs = expand_grid(ns, a, b, c, SimSpec{});
  ASSERT_EQ(specs.size(), 8u);
  EXPECT_EQ(specs.front().n, 50u);
  EXPECT_EQ(specs.back().n, 100u);
  // Every combination appears exactly once.
  for (std::size_t i = 0; i < specs.size(); ++i)
    for (std::size_t j = i + 1; j < specs.size(); ++j) EXPECT_FALSE(specs[i] == specs[j]);
}
