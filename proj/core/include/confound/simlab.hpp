#pragma once

// Synthetic (y, yhat, c) generator and type-I error / power grids.
//
//   y    ~ N(0, 1)
//   c    = f(N(0, 1)) + w_yc * g(y)
//   yhat = f(N(0, 1)) + w_yyhat * g(y) + w_cyhat * c
//
// with f the sinh-arcsinh transform and g the identity or tanh.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "confound/core.hpp"

namespace confound {

enum class Link { linear, sigmoid };
std::string_view to_string(Link link) noexcept;

struct BinarizeFlags {
  bool y = false;
  bool yhat = false;
  bool c = false;

  bool operator==(const BinarizeFlags&) const = default;
};

struct SimSpec {
  std::size_t n = 100;
  double w_yc = 1.0;
  double w_yyhat = 1.0;
  double w_cyhat = 0.0;
  double delta = 1.0;
  double epsilon = 0.0;
  Link link = Link::linear;
  BinarizeFlags binarize;
  std::uint64_t seed = 0;

  void validate() const;
  bool operator==(const SimSpec&) const = default;
};

std::vector<double> sinh_arcsinh(std::span<const double> x, double delta, double epsilon);

/// Draws one triplet. Binarised y and c become two-level categorical
/// variables; a binarised yhat stays numerical with values {0, 1}, the form a
/// thresholded classifier output takes when passed to the tests. Thresholding
/// happens after generation, so with a binarised y the pair (yhat, c) stays
/// dependent within each class even when w_cyhat = 0.
Triplet simulate_triplet(const SimSpec& spec);

/// Exact two-sided upper confidence limit for a binomial proportion.
double clopper_pearson_upper(std::size_t successes, std::size_t trials, double level = 0.95);

struct GridCell {
  SimSpec spec;
  double positive_rate = 0.0;
  std::size_t reps = 0;
  /// Largest rejection rate compatible with nominal alpha at this rep count.
  double ci_upper = 0.0;
  /// Set when a replicate raised; the cell's rate is then not reported.
  std::optional<std::string> failure;
};

struct GridResult {
  TestKind test = TestKind::partial;
  double alpha = 0.05;
  std::vector<GridCell> cells;
};

std::uint64_t cell_seed(const SimSpec& spec) noexcept;
std::uint64_t rep_seed(std::uint64_t cell, std::size_t rep) noexcept;

/// Simulates `reps` triplets per spec and records the fraction of p <= alpha.
/// Cells and replicates are spread over config.threads workers; every
/// replicate runs its test single-threaded, so results do not depend on the
/// thread count.
GridResult run_grid(std::span<const SimSpec> specs, std::size_t reps, TestKind test,
                    const TestConfig& config, double alpha = 0.05);

/// One row per cell: all spec fields, positive_rate, reps, ci_upper, status.
void write_grid_table(std::ostream& out, const GridResult& grid, char delimiter = ',');

/// Cartesian product of the listed values, in row-major order (n outermost).
std::vector<SimSpec> expand_grid(std::span<const std::size_t> ns, std::span<const double> w_yc,
                                 std::span<const double> w_yyhat, std::span<const double> w_cyhat,
                                 const SimSpec& base);

}  // namespace confound
