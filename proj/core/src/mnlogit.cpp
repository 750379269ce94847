#include <algorithm>
#include <cmath>
#include <limits>

#include "confound/condest.hpp"

namespace confound {

namespace {

constexpr std::size_t kMaxNewtonIterations = 100;
constexpr double kScoreTolerance = 1e-8;

struct Design {
  Eigen::MatrixXd x;  // n x (d+1), first column ones
  // Standardisation of a numerical predictor, undone when reporting weights.
  double center = 0.0;
  double scale = 1.0;
  bool standardized = false;
};

Design build_design(const Variable& conditioner) {
  const auto n = static_cast<Eigen::Index>(conditioner.size());
  Design design;
  if (conditioner.is_numerical()) {
    const auto values = conditioner.values();
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(n);
    if (!(var > 0.0)) {
      design.x = Eigen::MatrixXd::Ones(n, 1);
      return design;
    }
    design.center = mean;
    design.scale = std::sqrt(var);
    design.standardized = true;
    design.x.resize(n, 2);
    design.x.col(0).setOnes();
    for (Eigen::Index i = 0; i < n; ++i)
      design.x(i, 1) = (values[static_cast<std::size_t>(i)] - mean) / design.scale;
    return design;
  }

  const auto levels = static_cast<Eigen::Index>(conditioner.num_levels());
  const Eigen::Index d = std::max<Eigen::Index>(levels - 1, 0);
  design.x = Eigen::MatrixXd::Zero(n, d + 1);
  design.x.col(0).setOnes();
  const auto codes = conditioner.codes();
  for (Eigen::Index i = 0; i < n; ++i) {
    const int code = codes[static_cast<std::size_t>(i)];
    if (code > 0) design.x(i, code) = 1.0;
  }
  return design;
}

// Class log-probabilities for weights w ((K-1) x (d+1)); class 0 is the reference.
Eigen::MatrixXd log_softmax(const Eigen::MatrixXd& x, const Eigen::MatrixXd& w) {
  const Eigen::Index n = x.rows();
  const Eigen::Index k = w.rows() + 1;
  Eigen::MatrixXd eta(n, k);
  eta.col(0).setZero();
  eta.rightCols(k - 1) = x * w.transpose();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double top = eta.row(i).maxCoeff();
    const double lse = top + std::log((eta.row(i).array() - top).exp().sum());
    eta.row(i).array() -= lse;
  }
  return eta;
}

double penalized_objective(const Eigen::MatrixXd& log_probs, std::span<const int> codes,
                           const Eigen::MatrixXd& w, double ridge) {
  double ll = 0.0;
  for (Eigen::Index i = 0; i < log_probs.rows(); ++i)
    ll += log_probs(i, codes[static_cast<std::size_t>(i)]);
  return ll - 0.5 * ridge * w.rightCols(w.cols() - 1).squaredNorm();
}

}  // namespace

MnlogitFit fit_mnlogit(const Variable& conditioner, const Variable& response, double ridge) {
  if (!response.is_categorical())
    throw Error(ErrorCode::InvalidArgument, "mnlogit response must be categorical");
  if (conditioner.size() != response.size())
    throw Error(ErrorCode::LengthMismatch, "conditioner and response lengths differ");
  if (response.num_levels() < 2)
    throw Error(ErrorCode::DegenerateVariable, "mnlogit response needs at least two levels");
  if (!(ridge >= 0.0)) throw Error(ErrorCode::InvalidArgument, "ridge must be non-negative");

  const Design design = build_design(conditioner);
  const Eigen::MatrixXd& x = design.x;
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();
  const auto k = static_cast<Eigen::Index>(response.num_levels());
  const Eigen::Index classes = k - 1;
  const auto codes = response.codes();

  std::vector<double> counts(static_cast<std::size_t>(k), 0.0);
  for (int code : codes) counts[static_cast<std::size_t>(code)] += 1.0;

  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(classes, p);
  for (Eigen::Index c = 0; c < classes; ++c)
    w(c, 0) = std::log((counts[static_cast<std::size_t>(c + 1)] + 0.5) / (counts[0] + 0.5));

  Eigen::MatrixXd log_probs = log_softmax(x, w);
  double objective = penalized_objective(log_probs, codes, w, ridge);
  const Eigen::Index dim = classes * p;

  std::size_t iter = 0;
  double score_norm = std::numeric_limits<double>::infinity();
  for (;; ++iter) {
    const Eigen::MatrixXd probs = log_probs.array().exp();

    // Score (gradient of the penalised log-likelihood), flattened class-major.
    Eigen::MatrixXd residual = -probs.rightCols(classes);
    for (Eigen::Index i = 0; i < n; ++i) {
      const int code = codes[static_cast<std::size_t>(i)];
      if (code > 0) residual(i, code - 1) += 1.0;
    }
    Eigen::MatrixXd grad = residual.transpose() * x;
    grad.rightCols(p - 1) -= ridge * w.rightCols(p - 1);
    score_norm = grad.cwiseAbs().maxCoeff();
    if (score_norm < kScoreTolerance) break;
    if (iter >= kMaxNewtonIterations) {
      throw Error(ErrorCode::NoConvergence,
                  "mnlogit did not converge in " + std::to_string(kMaxNewtonIterations) +
                      " Newton iterations (max |score| = " + std::to_string(score_norm) + ")");
    }

    // Observed information: sum_i (diag(p_i) - p_i p_i^T) kron x_i x_i^T, plus ridge.
    Eigen::MatrixXd info = Eigen::MatrixXd::Zero(dim, dim);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::MatrixXd xx = x.row(i).transpose() * x.row(i);
      for (Eigen::Index a = 0; a < classes; ++a) {
        const double pa = probs(i, a + 1);
        for (Eigen::Index b = 0; b < classes; ++b) {
          const double weight = (a == b ? pa : 0.0) - pa * probs(i, b + 1);
          info.block(a * p, b * p, p, p) += weight * xx;
        }
      }
    }
    for (Eigen::Index a = 0; a < classes; ++a)
      for (Eigen::Index j = 1; j < p; ++j) info(a * p + j, a * p + j) += ridge;

    Eigen::VectorXd g(dim);
    for (Eigen::Index a = 0; a < classes; ++a) g.segment(a * p, p) = grad.row(a).transpose();
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(info);
    if (ldlt.info() != Eigen::Success)
      throw Error(ErrorCode::SingularSystem, "mnlogit information matrix is singular");
    const Eigen::VectorXd step = ldlt.solve(g);
    if (!step.allFinite())
      throw Error(ErrorCode::SingularSystem, "mnlogit Newton step is not finite");

    // Step halving keeps the penalised log-likelihood non-decreasing.
    double t = 1.0;
    bool accepted = false;
    for (int halving = 0; halving < 40; ++halving, t *= 0.5) {
      Eigen::MatrixXd candidate = w;
      for (Eigen::Index a = 0; a < classes; ++a)
        candidate.row(a) += t * step.segment(a * p, p).transpose();
      Eigen::MatrixXd candidate_lp = log_softmax(x, candidate);
      const double value = penalized_objective(candidate_lp, codes, candidate, ridge);
      if (value >= objective - 1e-12 * std::abs(objective)) {
        w = std::move(candidate);
        log_probs = std::move(candidate_lp);
        objective = value;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      throw Error(ErrorCode::NoConvergence,
                  "mnlogit line search failed (max |score| = " + std::to_string(score_norm) + ")");
    }
  }

  MnlogitFit fit;
  fit.iterations = iter;
  fit.num_predictors = static_cast<std::size_t>(p - 1);
  fit.log_probs = std::move(log_probs);
  fit.log_likelihood = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    fit.log_likelihood += fit.log_probs(i, codes[static_cast<std::size_t>(i)]);
  fit.weights = w;
  if (design.standardized) {
    fit.weights.col(1) = w.col(1) / design.scale;
    fit.weights.col(0) = w.col(0) - w.col(1) * (design.center / design.scale);
  }
  return fit;
}

}  // namespace confound
