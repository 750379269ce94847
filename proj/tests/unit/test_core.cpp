#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "confound/core.hpp"
#include "confound/rng.hpp"

using namespace confound;

namespace {

std::vector<double> ramp(std::size_t n) {
  std::vector<double> v(n);
  std::iota(v.begin(), v.end(), 0.0);
  return v;
}

ErrorCode code_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no confound::Error thrown";
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(ValidateTriplet, IdentityCaseIsValid) {
  const auto y = Variable::numerical(ramp(20));
  const Triplet t = validate_triplet(y, y, y);
  EXPECT_EQ(t.n(), 20u);
  EXPECT_TRUE(t.yhat.is_numerical());
}

TEST(ValidateTriplet, LengthMismatch) {
  const auto a = Variable::numerical(ramp(100));
  const auto b = Variable::numerical(ramp(99));
  EXPECT_EQ(code_of([&] { validate_triplet(a, a, b); }), ErrorCode::LengthMismatch);
}

TEST(ValidateTriplet, SingleLevelCategoricalIsDegenerate) {
  const auto y = Variable::numerical(ramp(20));
  const std::vector<std::string> site(20, "siteA");
  EXPECT_EQ(code_of([&] { validate_triplet(y, y, Variable::categorical(site)); }),
            ErrorCode::DegenerateVariable);
}

TEST(ValidateTriplet, ConstantNumericIsDegenerate) {
  const auto y = Variable::numerical(ramp(20));
  const auto flat = Variable::numerical(std::vector<double>(20, 3.0));
  EXPECT_EQ(code_of([&] { validate_triplet(y, flat, y); }), ErrorCode::DegenerateVariable);
}

TEST(ValidateTriplet, NonFinite) {
  auto v = ramp(20);
  v[7] = std::numeric_limits<double>::quiet_NaN();
  const auto y = Variable::numerical(ramp(20));
  EXPECT_EQ(code_of([&] { validate_triplet(y, y, Variable::numerical(v)); }), ErrorCode::NonFinite);
  v[7] = INFINITY;
  EXPECT_EQ(code_of([&] { validate_triplet(Variable::numerical(v), y, y); }), ErrorCode::NonFinite);
}

TEST(ValidateTriplet, TooFewRows) {
  const auto y = Variable::numerical(ramp(9));
  EXPECT_EQ(code_of([&] { validate_triplet(y, y, y); }), ErrorCode::TooFewRows);
}

TEST(ValidateTriplet, Idempotent) {
  std::vector<std::string> labels;
  for (int i = 0; i < 30; ++i) labels.push_back(i % 3 == 0 ? "b" : (i % 3 == 1 ? "z" : "a"));
  const auto y = Variable::numerical(ramp(30));
  // Sparse codes force a recode on first validation.
  std::vector<int> sparse(30);
  for (int i = 0; i < 30; ++i) sparse[i] = (i % 2) * 7 + 3;
  const Triplet once = validate_triplet(y, Variable::categorical_codes(sparse), Variable::categorical(labels));
  const Triplet twice = validate_triplet(once.y, once.yhat, once.c);
  EXPECT_EQ(once, twice);
}

TEST(ValidateTriplet, RecodingIsFirstAppearanceBijection) {
  const std::vector<std::string> labels = {"m", "f", "f", "x", "m", "x", "f", "m", "m", "x", "f", "x"};
  const auto y = Variable::numerical(ramp(labels.size()));
  const Triplet t = validate_triplet(y, y, Variable::categorical(labels));
  ASSERT_EQ(t.c.num_levels(), 3u);
  EXPECT_EQ(t.c.labels(), (std::vector<std::string>{"m", "f", "x"}));
  // Label -> code is a function and code -> label inverts it.
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int code = t.c.codes()[i];
    ASSERT_GE(code, 0);
    ASSERT_LT(static_cast<std::size_t>(code), t.c.num_levels());
    EXPECT_EQ(t.c.labels()[static_cast<std::size_t>(code)], labels[i]);
    EXPECT_EQ(t.c.values()[i], static_cast<double>(code));
  }
}

TEST(Variable, PermutedGathersByIndex) {
  const auto v = Variable::numerical({10, 11, 12, 13});
  const std::vector<std::size_t> perm = {2, 0, 3, 1};
  const auto p = v.permuted(perm);
  EXPECT_EQ(std::vector<double>(p.values().begin(), p.values().end()),
            (std::vector<double>{12, 10, 13, 11}));
}

TEST(TestConfig, RejectsZeroCounts) {
  TestConfig c;
  c.num_permutations = 0;
  EXPECT_EQ(code_of([&] { c.validate(); }), ErrorCode::InvalidArgument);
  c.num_permutations = 1;
  c.mcmc_steps = 0;
  EXPECT_EQ(code_of([&] { c.validate(); }), ErrorCode::InvalidArgument);
}

TEST(Rng, UniformRangeAndDeterminism) {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) {
    const double u = a.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    ASSERT_EQ(u, b.uniform());
  }
}

TEST(Rng, BelowIsRoughlyUniform) {
  Rng rng(3);
  std::vector<int> counts(7, 0);
  const int draws = 70000;
  for (int i = 0; i < draws; ++i) ++counts[rng.below(7)];
  for (int c : counts) EXPECT_NEAR(c, draws / 7.0, 5 * std::sqrt(draws / 7.0));
}

TEST(Rng, DerivedSeedsDiffer) {
  EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
  EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
  EXPECT_EQ(derive_seed(5, 9), derive_seed(5, 9));
}
