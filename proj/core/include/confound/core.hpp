#pragma once

// Domain types shared by every module: variables, triplets, test
// configuration and the error type thrown on invalid input or numerical
// failure.

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace confound {

enum class ErrorCode {
  LengthMismatch,
  NonFinite,
  DegenerateVariable,
  TooFewRows,
  DegenerateRange,
  SingularSystem,
  NoConvergence,
  NumericalInstability,
  ModelMisuse,
  InvalidArgument,
  FileNotFound,
  MissingColumn,
  ParseError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// True for failures of a numerical routine (as opposed to bad input).
bool is_numerical_failure(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

enum class VarKind { numerical, categorical };

/// One column of the (y, yhat, c) triplet.
///
/// Numerical variables hold real values. Categorical variables hold integer
/// level codes in [0, num_levels) together with the original labels; values()
/// exposes the codes as doubles so both kinds can be permuted uniformly.
class Variable {
 public:
  Variable() = default;

  static Variable numerical(std::vector<double> values);
  /// Codes labels densely in first-appearance order.
  static Variable categorical(std::span<const std::string> labels);
  /// Codes must be non-negative. Missing labels default to the code's decimal text.
  static Variable categorical_codes(std::span<const int> codes,
                                    std::vector<std::string> level_labels = {});

  VarKind kind() const noexcept { return kind_; }
  bool is_numerical() const noexcept { return kind_ == VarKind::numerical; }
  bool is_categorical() const noexcept { return kind_ == VarKind::categorical; }
  std::size_t size() const noexcept { return values_.size(); }

  std::span<const double> values() const noexcept { return values_; }
  std::span<const int> codes() const noexcept { return codes_; }
  std::size_t num_levels() const noexcept { return labels_.size(); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

  /// Returns the variable reordered so that out[i] = this[perm[i]].
  Variable permuted(std::span<const std::size_t> perm) const;

  bool operator==(const Variable&) const = default;

 private:
  VarKind kind_ = VarKind::numerical;
  std::vector<double> values_;
  std::vector<int> codes_;
  std::vector<std::string> labels_;
};

struct Triplet {
  Variable y;
  Variable yhat;
  Variable c;

  std::size_t n() const noexcept { return y.size(); }
  bool operator==(const Triplet&) const = default;
};

inline constexpr std::size_t kMinRows = 10;

/// Checks lengths, finiteness and non-degeneracy, and re-codes categorical
/// columns to dense levels in first-appearance order.
Triplet validate_triplet(const Variable& y, const Variable& yhat, const Variable& c);

enum class TestKind { partial, full };
std::string_view to_string(TestKind kind) noexcept;

enum class PValueMode {
  inclusive,      // (1 + #{t_null >= t_obs}) / (m + 1)
  paper_literal,  // #{t_null >= t_obs} / m
};
std::string_view to_string(PValueMode mode) noexcept;

/// How the conditional density of the permuted variable is estimated.
enum class DensityModel { gam, linear };
std::string_view to_string(DensityModel model) noexcept;

struct TestConfig {
  std::size_t num_permutations = 1000;
  std::size_t mcmc_steps = 50;
  std::uint64_t seed = 0;
  PValueMode p_value_mode = PValueMode::inclusive;
  DensityModel density = DensityModel::gam;
  /// Worker threads; 0 means all hardware threads. Results do not depend on it.
  unsigned threads = 1;

  void validate() const;
};

}  // namespace confound
