#include "confound/core.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace confound {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::DegenerateVariable: return "DegenerateVariable";
    case ErrorCode::TooFewRows: return "TooFewRows";
    case ErrorCode::DegenerateRange: return "DegenerateRange";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NumericalInstability: return "NumericalInstability";
    case ErrorCode::ModelMisuse: return "ModelMisuse";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::FileNotFound: return "FileNotFound";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

bool is_numerical_failure(ErrorCode code) noexcept {
  return code == ErrorCode::SingularSystem || code == ErrorCode::NoConvergence ||
         code == ErrorCode::NumericalInstability;
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

Variable Variable::numerical(std::vector<double> values) {
  Variable v;
  v.kind_ = VarKind::numerical;
  v.values_ = std::move(values);
  return v;
}

Variable Variable::categorical(std::span<const std::string> labels) {
  Variable v;
  v.kind_ = VarKind::categorical;
  std::unordered_map<std::string, int> index;
  v.codes_.reserve(labels.size());
  v.values_.reserve(labels.size());
  for (const auto& label : labels) {
    auto [it, inserted] = index.try_emplace(label, static_cast<int>(v.labels_.size()));
    if (inserted) v.labels_.push_back(label);
    v.codes_.push_back(it->second);
    v.values_.push_back(static_cast<double>(it->second));
  }
  return v;
}

Variable Variable::categorical_codes(std::span<const int> codes,
                                     std::vector<std::string> level_labels) {
  Variable v;
  v.kind_ = VarKind::categorical;
  int max_code = -1;
  for (int code : codes) {
    if (code < 0) throw Error(ErrorCode::InvalidArgument, "negative category code");
    max_code = std::max(max_code, code);
  }
  const auto needed = static_cast<std::size_t>(max_code + 1);
  if (level_labels.size() < needed) {
    for (std::size_t k = level_labels.size(); k < needed; ++k)
      level_labels.push_back(std::to_string(k));
  }
  v.labels_ = std::move(level_labels);
  v.codes_.assign(codes.begin(), codes.end());
  v.values_.assign(codes.begin(), codes.end());
  return v;
}

Variable Variable::permuted(std::span<const std::size_t> perm) const {
  if (perm.size() != size())
    throw Error(ErrorCode::LengthMismatch, "permutation length differs from variable length");
  Variable out;
  out.kind_ = kind_;
  out.labels_ = labels_;
  out.values_.resize(size());
  for (std::size_t i = 0; i < perm.size(); ++i) out.values_[i] = values_[perm[i]];
  if (is_categorical()) {
    out.codes_.resize(size());
    for (std::size_t i = 0; i < perm.size(); ++i) out.codes_[i] = codes_[perm[i]];
  }
  return out;
}

namespace {

Variable checked(const Variable& v, std::string_view name) {
  if (v.is_numerical()) {
    const auto values = v.values();
    for (double x : values) {
      if (!std::isfinite(x))
        throw Error(ErrorCode::NonFinite, std::string(name) + " contains NaN or Inf");
    }
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    if (*lo == *hi)
      throw Error(ErrorCode::DegenerateVariable, std::string(name) + " is constant");
    return v;
  }

  // Re-code to dense levels in first-appearance order, dropping unused labels.
  std::vector<int> remap(v.num_levels(), -1);
  std::vector<std::string> labels;
  std::vector<int> codes;
  codes.reserve(v.size());
  for (int code : v.codes()) {
    auto& slot = remap[static_cast<std::size_t>(code)];
    if (slot < 0) {
      slot = static_cast<int>(labels.size());
      labels.push_back(v.labels()[static_cast<std::size_t>(code)]);
    }
    codes.push_back(slot);
  }
  if (labels.size() < 2)
    throw Error(ErrorCode::DegenerateVariable, std::string(name) + " has a single level");
  return Variable::categorical_codes(codes, std::move(labels));
}

}  // namespace

Triplet validate_triplet(const Variable& y, const Variable& yhat, const Variable& c) {
  if (y.size() != yhat.size() || y.size() != c.size()) {
    throw Error(ErrorCode::LengthMismatch,
                "column lengths differ (y=" + std::to_string(y.size()) +
                    ", yhat=" + std::to_string(yhat.size()) +
                    ", c=" + std::to_string(c.size()) + ")");
  }
  Triplet t{checked(y, "y"), checked(yhat, "yhat"), checked(c, "c")};
  if (t.n() < kMinRows) {
    throw Error(ErrorCode::TooFewRows, "need at least " + std::to_string(kMinRows) +
                                           " rows, got " + std::to_string(t.n()));
  }
  return t;
}

std::string_view to_string(TestKind kind) noexcept {
  return kind == TestKind::partial ? "partial" : "full";
}

std::string_view to_string(PValueMode mode) noexcept {
  return mode == PValueMode::inclusive ? "inclusive" : "paper_literal";
}

std::string_view to_string(DensityModel model) noexcept {
  return model == DensityModel::gam ? "gam" : "linear";
}

void TestConfig::validate() const {
  if (num_permutations < 1)
    throw Error(ErrorCode::InvalidArgument, "num_permutations must be >= 1");
  if (mcmc_steps < 1) throw Error(ErrorCode::InvalidArgument, "mcmc_steps must be >= 1");
}

}  // namespace confound
