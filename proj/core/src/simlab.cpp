#include "confound/simlab.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <ostream>

#include <boost/math/special_functions/beta.hpp>

#include "confound/confoundtest.hpp"
#include "confound/parallel.hpp"
#include "confound/rng.hpp"

namespace confound {

std::string_view to_string(Link link) noexcept {
  return link == Link::linear ? "linear" : "sigmoid";
}

void SimSpec::validate() const {
  if (n < kMinRows)
    throw Error(ErrorCode::InvalidArgument, "simulation needs n >= " + std::to_string(kMinRows));
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw Error(ErrorCode::InvalidArgument, "delta must be positive");
  if (!std::isfinite(epsilon) || !std::isfinite(w_yc) || !std::isfinite(w_yyhat) ||
      !std::isfinite(w_cyhat))
    throw Error(ErrorCode::InvalidArgument, "simulation weights must be finite");
}

std::vector<double> sinh_arcsinh(std::span<const double> x, double delta, double epsilon) {
  if (!(delta > 0.0)) throw Error(ErrorCode::InvalidArgument, "delta must be positive");
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    out[i] = std::sinh(delta * std::asinh(x[i]) - epsilon);
  return out;
}

namespace {

double link_fn(Link link, double x) { return link == Link::linear ? x : std::tanh(x); }

Variable threshold_categorical(std::span<const double> x) {
  std::vector<int> codes(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) codes[i] = x[i] > 0.0 ? 1 : 0;
  return Variable::categorical_codes(codes, {"0", "1"});
}

std::vector<double> threshold_numeric(std::span<const double> x) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] > 0.0 ? 1.0 : 0.0;
  return out;
}

std::vector<double> draw_normals(Rng& rng, std::size_t n) {
  std::vector<double> out(n);
  for (double& v : out) v = rng.normal();
  return out;
}

}  // namespace

Triplet simulate_triplet(const SimSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  const std::size_t n = spec.n;
  const std::vector<double> y = draw_normals(rng, n);
  std::vector<double> c = sinh_arcsinh(draw_normals(rng, n), spec.delta, spec.epsilon);
  std::vector<double> yhat = sinh_arcsinh(draw_normals(rng, n), spec.delta, spec.epsilon);
  for (std::size_t i = 0; i < n; ++i) {
    const double gy = link_fn(spec.link, y[i]);
    c[i] += spec.w_yc * gy;
    yhat[i] += spec.w_yyhat * gy + spec.w_cyhat * c[i];
  }

  const Variable vy = spec.binarize.y ? threshold_categorical(y) : Variable::numerical(y);
  const Variable vc = spec.binarize.c ? threshold_categorical(c) : Variable::numerical(c);
  const Variable vyhat = Variable::numerical(spec.binarize.yhat ? threshold_numeric(yhat) : yhat);
  return validate_triplet(vy, vyhat, vc);
}

double clopper_pearson_upper(std::size_t successes, std::size_t trials, double level) {
  if (trials < 1) throw Error(ErrorCode::InvalidArgument, "need at least one trial");
  if (successes > trials) throw Error(ErrorCode::InvalidArgument, "successes exceed trials");
  if (!(level > 0.0 && level < 1.0))
    throw Error(ErrorCode::InvalidArgument, "confidence level must lie in (0, 1)");
  if (successes == trials) return 1.0;
  const double upper_tail = 1.0 - (1.0 - level) / 2.0;
  return boost::math::ibeta_inv(static_cast<double>(successes + 1),
                                static_cast<double>(trials - successes), upper_tail);
}

std::uint64_t cell_seed(const SimSpec& spec) noexcept {
  std::uint64_t h = mix64(spec.seed);
  const auto absorb = [&h](std::uint64_t v) { h = mix64(h ^ v); };
  absorb(spec.n);
  absorb(std::bit_cast<std::uint64_t>(spec.w_yc));
  absorb(std::bit_cast<std::uint64_t>(spec.w_yyhat));
  absorb(std::bit_cast<std::uint64_t>(spec.w_cyhat));
  absorb(std::bit_cast<std::uint64_t>(spec.delta));
  absorb(std::bit_cast<std::uint64_t>(spec.epsilon));
  absorb(static_cast<std::uint64_t>(spec.link));
  absorb((spec.binarize.y ? 1u : 0u) | (spec.binarize.yhat ? 2u : 0u) | (spec.binarize.c ? 4u : 0u));
  return h;
}

std::uint64_t rep_seed(std::uint64_t cell, std::size_t rep) noexcept {
  return derive_seed(cell, rep);
}

GridResult run_grid(std::span<const SimSpec> specs, std::size_t reps, TestKind test,
                    const TestConfig& config, double alpha) {
  if (reps < 1) throw Error(ErrorCode::InvalidArgument, "reps must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0, 1)");
  config.validate();
  for (const auto& spec : specs) spec.validate();

  struct Outcome {
    bool positive = false;
    std::optional<std::string> failure;
  };
  std::vector<Outcome> outcomes(specs.size() * reps);

  parallel_for(outcomes.size(), config.threads, [&](std::size_t job) {
    const SimSpec& base = specs[job / reps];
    const std::size_t rep = job % reps;
    SimSpec spec = base;
    spec.seed = rep_seed(cell_seed(base), rep);
    TestConfig inner = config;
    inner.threads = 1;
    inner.seed = derive_seed(spec.seed, config.seed);
    try {
      const Triplet t = simulate_triplet(spec);
      outcomes[job].positive = confound_test(test, t, inner).p_value <= alpha;
    } catch (const Error& e) {
      outcomes[job].failure = e.what();
    }
  });

  GridResult grid;
  grid.test = test;
  grid.alpha = alpha;
  const auto expected = static_cast<std::size_t>(std::lround(alpha * static_cast<double>(reps)));
  const double threshold = clopper_pearson_upper(expected, reps);
  for (std::size_t s = 0; s < specs.size(); ++s) {
    GridCell cell;
    cell.spec = specs[s];
    cell.reps = reps;
    cell.ci_upper = threshold;
    std::size_t positives = 0;
    for (std::size_t r = 0; r < reps; ++r) {
      const Outcome& o = outcomes[s * reps + r];
      if (o.failure && !cell.failure) cell.failure = "rep " + std::to_string(r) + ": " + *o.failure;
      positives += o.positive ? 1 : 0;
    }
    cell.positive_rate = static_cast<double>(positives) / static_cast<double>(reps);
    grid.cells.push_back(std::move(cell));
  }
  return grid;
}

namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

}  // namespace

void write_grid_table(std::ostream& out, const GridResult& grid, char delimiter) {
  const char d = delimiter;
  out << "test" << d << "n" << d << "w_yc" << d << "w_yyhat" << d << "w_cyhat" << d << "delta"
      << d << "epsilon" << d << "link" << d << "binarize_y" << d << "binarize_yhat" << d
      << "binarize_c" << d << "seed" << d << "alpha" << d << "positive_rate" << d << "reps" << d
      << "ci_upper" << d << "status" << '\n';
  for (const auto& cell : grid.cells) {
    const SimSpec& s = cell.spec;
    out << to_string(grid.test) << d << s.n << d << format_double(s.w_yc) << d
        << format_double(s.w_yyhat) << d << format_double(s.w_cyhat) << d
        << format_double(s.delta) << d << format_double(s.epsilon) << d << to_string(s.link) << d
        << int{s.binarize.y} << d << int{s.binarize.yhat} << d << int{s.binarize.c} << d << s.seed
        << d << format_double(grid.alpha) << d;
    if (cell.failure) {
      out << "" << d << cell.reps << d << format_double(cell.ci_upper) << d << "failed" << '\n';
    } else {
      out << format_double(cell.positive_rate) << d << cell.reps << d
          << format_double(cell.ci_upper) << d << "ok" << '\n';
    }
  }
}

std::vector<SimSpec> expand_grid(std::span<const std::size_t> ns, std::span<const double> w_yc,
                                 std::span<const double> w_yyhat, std::span<const double> w_cyhat,
                                 const SimSpec& base) {
  std::vector<SimSpec> specs;
  specs.reserve(ns.size() * w_yc.size() * w_yyhat.size() * w_cyhat.size());
  for (std::size_t n : ns)
    for (double cyhat : w_cyhat)
      for (double yc : w_yc)
        for (double yyhat : w_yyhat) {
          SimSpec spec = base;
          spec.n = n;
          spec.w_yc = yc;
          spec.w_yyhat = yyhat;
          spec.w_cyhat = cyhat;
          specs.push_back(spec);
        }
  return specs;
}

}  // namespace confound
