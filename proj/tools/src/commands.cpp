#include "confound/cli/commands.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"

#include "confound/cli/ingest.hpp"
#include "confound/cli/report.hpp"
#include "confound/confoundtest.hpp"
#include "confound/rng.hpp"
#include "confound/simlab.hpp"
#include "confound/version.hpp"

namespace confound::cli {

namespace {

const std::map<std::string, ColumnType> kColumnTypes = {
    {"auto", ColumnType::automatic}, {"num", ColumnType::numerical}, {"cat", ColumnType::categorical}};
const std::map<std::string, PValueMode> kPModes = {
    {"inclusive", PValueMode::inclusive}, {"paper", PValueMode::paper_literal}};
const std::map<std::string, DensityModel> kDensities = {
    {"gam", DensityModel::gam}, {"linear", DensityModel::linear}};
const std::map<std::string, Link> kLinks = {{"linear", Link::linear}, {"sigmoid", Link::sigmoid}};
const std::map<std::string, TestKind> kKinds = {{"partial", TestKind::partial}, {"full", TestKind::full}};

struct TestOptions {
  std::string input;
  std::string test = "partial";
  std::string y_col = "y";
  std::string yhat_col = "yhat";
  std::string c_col = "c";
  std::string y_type = "auto";
  std::string c_type = "auto";
  std::size_t n_perms = 1000;
  std::size_t mcmc_steps = 50;
  std::uint64_t seed = 0;
  double alpha = 0.05;
  std::string p_mode = "inclusive";
  std::string format = "json";
  std::string quantile_normal = "none";
  std::string density = "gam";
  unsigned threads = 0;
  std::string out;
  bool timing = false;
};

struct SimOptions {
  std::size_t n = 100;
  double w_yc = 1.0;
  double w_yyhat = 1.0;
  double w_cyhat = 0.0;
  double delta = 1.0;
  double epsilon = 0.0;
  std::string link = "linear";
  std::vector<std::string> binarize;
  std::uint64_t seed = 0;
  std::string out;
};

struct GridOptions {
  std::vector<double> w_yc = {0.5, 1, 2, 3};
  std::vector<double> w_yyhat = {0.5, 1, 2, 3};
  std::vector<double> w_cyhat = {0, 0.2, 0.4, 0.6};
  std::vector<std::size_t> n = {50, 100, 500, 1000};
  double delta = 1.0;
  double epsilon = 0.0;
  std::string link = "linear";
  std::vector<std::string> binarize;
  std::size_t reps = 100;
  std::uint64_t seed = 0;
  std::string test = "partial";
  std::size_t n_perms = 1000;
  std::size_t mcmc_steps = 50;
  double alpha = 0.05;
  std::string p_mode = "inclusive";
  std::string density = "gam";
  unsigned threads = 0;
  std::string out;
};

BinarizeFlags parse_binarize(const std::vector<std::string>& names) {
  BinarizeFlags flags;
  for (const auto& name : names) {
    if (name == "y") flags.y = true;
    else if (name == "yhat") flags.yhat = true;
    else if (name == "c") flags.c = true;
    else if (name != "none")
      throw Error(ErrorCode::InvalidArgument, "--binarize accepts y, yhat, c or none, got '" + name + "'");
  }
  return flags;
}

// Writes to --out when given, otherwise to the provided stream.
void emit(const std::string& path, std::ostream& fallback, const std::string& content) {
  if (path.empty()) {
    fallback << content;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorCode::FileNotFound, "cannot write '" + path + "'");
  file << content;
}

std::string render_value(const Variable& v, std::size_t i) {
  if (v.is_categorical()) return v.labels()[static_cast<std::size_t>(v.codes()[i])];
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v.values()[i]);
  return buf;
}

Triplet apply_quantile_normal(const Triplet& t, const std::string& which) {
  if (which == "none") return t;
  const Variable& target = which == "y" ? t.y : t.c;
  if (!target.is_numerical())
    throw Error(ErrorCode::InvalidArgument, "--quantile-normal " + which + " needs a numerical column");
  Variable transformed = Variable::numerical(quantile_transform_normal(target.values()));
  return which == "y" ? validate_triplet(transformed, t.yhat, t.c)
                      : validate_triplet(t.y, t.yhat, transformed);
}

int cmd_test(const TestOptions& opt, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();

  TypeOverrides types;
  types.y = kColumnTypes.at(opt.y_type);
  types.c = kColumnTypes.at(opt.c_type);
  const IngestResult ingested = ingest_table(opt.input, opt.y_col, opt.yhat_col, opt.c_col, types);
  const Triplet triplet = apply_quantile_normal(ingested.triplet, opt.quantile_normal);

  TestConfig config;
  config.num_permutations = opt.n_perms;
  config.mcmc_steps = opt.mcmc_steps;
  config.seed = opt.seed;
  config.p_value_mode = kPModes.at(opt.p_mode);
  config.density = kDensities.at(opt.density);
  config.threads = opt.threads;

  std::vector<TestKind> kinds;
  if (opt.test == "partial" || opt.test == "both") kinds.push_back(TestKind::partial);
  if (opt.test == "full" || opt.test == "both") kinds.push_back(TestKind::full);

  std::vector<ConfoundTestResult> results;
  for (TestKind kind : kinds) results.push_back(confound_test(kind, triplet, config));

  // Unconditional companions share --n-perms and derive their seeds from --seed.
  const auto p_y_c = unconditional_perm_test(triplet.y, triplet.c, opt.n_perms, derive_seed(opt.seed, 101));
  const auto p_yhat_c =
      unconditional_perm_test(triplet.yhat, triplet.c, opt.n_perms, derive_seed(opt.seed, 102));
  const auto p_yhat_y = unconditional_perm_test(triplet.yhat, triplet.y, opt.n_perms,
                                                derive_seed(opt.seed, 103), OtherRole::target);

  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::vector<Report> reports;
  for (const auto& res : results) {
    Report r;
    r.test_kind = std::string(to_string(res.kind));
    r.p_value = res.p_value;
    r.t_observed = res.t_observed.value;
    r.t_family = std::string(to_string(res.t_observed.family));
    r.r2_y_c = res.r2_y_c.value;
    r.p_y_c = p_y_c.p;
    r.r2_yhat_c = res.r2_yhat_c.value;
    r.p_yhat_c = p_yhat_c.p;
    r.r2_yhat_y = res.r2_yhat_y.value;
    r.p_yhat_y = p_yhat_y.p;
    r.n = triplet.n();
    r.m = config.num_permutations;
    r.mcmc_steps = config.mcmc_steps;
    r.seed = config.seed;
    r.p_mode = opt.p_mode;
    r.density = opt.density;
    r.alpha = opt.alpha;
    r.reject = res.p_value <= opt.alpha;
    r.y_col = ingested.columns[0];
    r.yhat_col = ingested.columns[1];
    r.c_col = ingested.columns[2];
    r.quantile_normal = opt.quantile_normal;
    r.rows_read = ingested.rows_read;
    r.dropped_rows = ingested.dropped_rows;
    r.duration_seconds = opt.timing ? elapsed : 0.0;
    r.version = kVersion;
    r.t_null = res.t_null;
    reports.push_back(std::move(r));
  }

  if (opt.format == "json") {
    emit(opt.out, out, dump_reports(reports));
  } else {
    std::ostringstream text;
    write_text(text, reports);
    emit(opt.out, out, text.str());
  }
  for (const auto& r : reports) err << verdict_line(r) << '\n';
  return kExitOk;
}

int cmd_simulate(const SimOptions& opt, std::ostream& out) {
  SimSpec spec;
  spec.n = opt.n;
  spec.w_yc = opt.w_yc;
  spec.w_yyhat = opt.w_yyhat;
  spec.w_cyhat = opt.w_cyhat;
  spec.delta = opt.delta;
  spec.epsilon = opt.epsilon;
  spec.link = kLinks.at(opt.link);
  spec.binarize = parse_binarize(opt.binarize);
  spec.seed = opt.seed;
  const Triplet t = simulate_triplet(spec);

  std::ostringstream table;
  table << "y,yhat,c\n";
  for (std::size_t i = 0; i < t.n(); ++i)
    table << render_value(t.y, i) << ',' << render_value(t.yhat, i) << ',' << render_value(t.c, i) << '\n';
  emit(opt.out, out, table.str());
  return kExitOk;
}

int cmd_power_grid(const GridOptions& opt, std::ostream& out) {
  SimSpec base;
  base.delta = opt.delta;
  base.epsilon = opt.epsilon;
  base.link = kLinks.at(opt.link);
  base.binarize = parse_binarize(opt.binarize);
  base.seed = opt.seed;
  const auto specs = expand_grid(opt.n, opt.w_yc, opt.w_yyhat, opt.w_cyhat, base);

  TestConfig config;
  config.num_permutations = opt.n_perms;
  config.mcmc_steps = opt.mcmc_steps;
  config.seed = opt.seed;
  config.p_value_mode = kPModes.at(opt.p_mode);
  config.density = kDensities.at(opt.density);
  config.threads = opt.threads;

  const GridResult grid = run_grid(specs, opt.reps, kKinds.at(opt.test), config, opt.alpha);
  std::ostringstream table;
  write_grid_table(table, grid);
  emit(opt.out, out, table.str());
  return kExitOk;
}

template <typename Map>
auto keys_of(const Map& map) {
  std::vector<std::string> keys;
  for (const auto& [k, v] : map) keys.push_back(k);
  return keys;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Conditional permutation tests for confounding bias in predictive models", "confound"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  TestOptions test_opt;
  auto* test = app.add_subcommand("test", "Run the partial and/or full confounder test on a table");
  test->add_option("input", test_opt.input, "Comma- or tab-separated table with a header row")
      ->required();
  test->add_option("--test", test_opt.test, "Which test to run")
      ->check(CLI::IsMember({"partial", "full", "both"}))->capture_default_str();
  test->add_option("--y-col", test_opt.y_col, "Target column")->capture_default_str();
  test->add_option("--yhat-col", test_opt.yhat_col, "Model prediction column")->capture_default_str();
  test->add_option("--c-col", test_opt.c_col, "Confounder column")->capture_default_str();
  test->add_option("--y-type", test_opt.y_type)->check(CLI::IsMember(keys_of(kColumnTypes)))->capture_default_str();
  test->add_option("--c-type", test_opt.c_type)->check(CLI::IsMember(keys_of(kColumnTypes)))->capture_default_str();
  test->add_option("--n-perms", test_opt.n_perms, "Number of conditional permutations (10000 for publication-grade runs)")
      ->check(CLI::PositiveNumber)->capture_default_str();
  test->add_option("--mcmc-steps", test_opt.mcmc_steps)->check(CLI::PositiveNumber)->capture_default_str();
  test->add_option("--seed", test_opt.seed)->capture_default_str();
  test->add_option("--alpha", test_opt.alpha)->check(CLI::Range(0.0, 1.0))->capture_default_str();
  test->add_option("--p-mode", test_opt.p_mode)->check(CLI::IsMember(keys_of(kPModes)))->capture_default_str();
  test->add_option("--format", test_opt.format)->check(CLI::IsMember({"json", "text"}))->capture_default_str();
  test->add_option("--quantile-normal", test_opt.quantile_normal, "Rank-normalise a column before testing")
      ->check(CLI::IsMember({"y", "c", "none"}))->capture_default_str();
  test->add_option("--density", test_opt.density, "Conditional density model")
      ->check(CLI::IsMember(keys_of(kDensities)))->capture_default_str();
  test->add_option("--threads", test_opt.threads, "Worker threads (0 = all cores)")->capture_default_str();
  test->add_option("--out", test_opt.out, "Write the report here instead of standard output");
  test->add_flag("--timing", test_opt.timing, "Record wall-clock duration in the report");

  SimOptions sim_opt;
  auto* sim = app.add_subcommand("simulate", "Write one synthetic (y, yhat, c) table");
  sim->add_option("--n", sim_opt.n)->check(CLI::Range(std::size_t{10}, std::size_t{100000000}))->capture_default_str();
  sim->add_option("--w-yc", sim_opt.w_yc)->capture_default_str();
  sim->add_option("--w-yyhat", sim_opt.w_yyhat)->capture_default_str();
  sim->add_option("--w-cyhat", sim_opt.w_cyhat)->capture_default_str();
  sim->add_option("--delta", sim_opt.delta)->check(CLI::PositiveNumber)->capture_default_str();
  sim->add_option("--epsilon", sim_opt.epsilon)->capture_default_str();
  sim->add_option("--link", sim_opt.link)->check(CLI::IsMember(keys_of(kLinks)))->capture_default_str();
  sim->add_option("--binarize", sim_opt.binarize, "Subset of y,yhat,c to threshold at 0")->delimiter(',');
  sim->add_option("--seed", sim_opt.seed)->capture_default_str();
  sim->add_option("--out", sim_opt.out);

  GridOptions grid_opt;
  auto* grid = app.add_subcommand("power-grid", "Run a type-I error / power simulation grid");
  grid->add_option("--w-yc", grid_opt.w_yc)->delimiter(',')->capture_default_str();
  grid->add_option("--w-yyhat", grid_opt.w_yyhat)->delimiter(',')->capture_default_str();
  grid->add_option("--w-cyhat", grid_opt.w_cyhat)->delimiter(',')->capture_default_str();
  grid->add_option("--n", grid_opt.n)->delimiter(',')->capture_default_str();
  grid->add_option("--delta", grid_opt.delta)->check(CLI::PositiveNumber)->capture_default_str();
  grid->add_option("--epsilon", grid_opt.epsilon)->capture_default_str();
  grid->add_option("--link", grid_opt.link)->check(CLI::IsMember(keys_of(kLinks)))->capture_default_str();
  grid->add_option("--binarize", grid_opt.binarize, "Subset of y,yhat,c to threshold at 0")->delimiter(',');
  grid->add_option("--reps", grid_opt.reps)->check(CLI::PositiveNumber)->capture_default_str();
  grid->add_option("--seed", grid_opt.seed)->capture_default_str();
  grid->add_option("--test", grid_opt.test)->check(CLI::IsMember(keys_of(kKinds)))->capture_default_str();
  grid->add_option("--n-perms", grid_opt.n_perms)->check(CLI::PositiveNumber)->capture_default_str();
  grid->add_option("--mcmc-steps", grid_opt.mcmc_steps)->check(CLI::PositiveNumber)->capture_default_str();
  grid->add_option("--alpha", grid_opt.alpha)->check(CLI::Range(0.0, 1.0))->capture_default_str();
  grid->add_option("--p-mode", grid_opt.p_mode)->check(CLI::IsMember(keys_of(kPModes)))->capture_default_str();
  grid->add_option("--density", grid_opt.density)->check(CLI::IsMember(keys_of(kDensities)))->capture_default_str();
  grid->add_option("--threads", grid_opt.threads, "Worker threads (0 = all cores)")->capture_default_str();
  grid->add_option("--out", grid_opt.out);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help(app.get_subcommands().empty() ? "" : app.get_subcommands().front()->get_name());
      return kExitOk;
    }
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }

  try {
    if (test->parsed()) return cmd_test(test_opt, out, err);
    if (sim->parsed()) return cmd_simulate(sim_opt, out);
    return cmd_power_grid(grid_opt, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return is_numerical_failure(e.code()) ? kExitNumericalFailure : kExitInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }
}

}  // namespace confound::cli
