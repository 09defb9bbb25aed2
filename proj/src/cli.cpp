#include "normgd/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "normgd/errors.hpp"
#include "normgd/experiments.hpp"

namespace normgd::cli {

namespace {

// Flags shared by converge, slope and scaling. Unset optionals keep the
// model/regime defaults.
struct ExperimentFlags {
  std::string model;
  std::string regime;
  std::optional<std::size_t> n;
  std::vector<std::size_t> n_grid;
  std::optional<int> p;
  std::optional<std::size_t> d;
  std::vector<double> theta_star;
  std::optional<double> sigma;
  std::vector<std::string> algorithms;
  std::vector<std::string> eta;
  std::vector<std::string> max_iter;
  std::uint64_t seed = 1;
  std::optional<std::size_t> repeats;
  std::string out;
  std::size_t jobs = 0;
  std::string eig_backend = "auto";
  double eig_tol = 1e-8;
  std::size_t eig_max_iter = 0;
  std::optional<double> init_radius;
  double stop_tol = 0.0;
  bool dump_data = false;
  double radius_multiplier = 2.0;
};

void add_experiment_flags(CLI::App& cmd, ExperimentFlags& f, bool grid) {
  cmd.add_option("--model", f.model, "glm or gmm")->required()->check(
      CLI::IsMember({"glm", "gmm"}));
  cmd.add_option("--regime", f.regime, "strong or low")->required()->check(
      CLI::IsMember({"strong", "low"}));
  if (grid) {
    cmd.add_option("--n-grid", f.n_grid, "comma-separated sample sizes")->delimiter(',');
  } else {
    cmd.add_option("--n", f.n, "sample size");
  }
  cmd.add_option("--p", f.p, "GLM link exponent");
  cmd.add_option("--d", f.d, "dimension");
  cmd.add_option("--theta-star", f.theta_star, "comma-separated true parameter")->delimiter(',');
  cmd.add_option("--sigma", f.sigma, "noise / component standard deviation");
  cmd.add_option("--algorithms", f.algorithms, "comma-separated subset of normgd,gd,em")
      ->delimiter(',');
  cmd.add_option("--eta", f.eta, "step size: VALUE for all algorithms or ALG=VALUE list")
      ->delimiter(',');
  cmd.add_option("--max-iter", f.max_iter, "iteration cap: VALUE or ALG=VALUE list")
      ->delimiter(',');
  cmd.add_option("--seed", f.seed, "master seed")->capture_default_str();
  cmd.add_option("--repeats", f.repeats, "repeats per sample size (default 10)");
  cmd.add_option("--out", f.out, "output directory");
  cmd.add_option("--jobs", f.jobs, "parallel trials; 0 = hardware concurrency")
      ->capture_default_str();
  cmd.add_option("--eig-backend", f.eig_backend, "auto, exact or power")
      ->check(CLI::IsMember({"auto", "exact", "power"}))
      ->capture_default_str();
  cmd.add_option("--eig-tol", f.eig_tol, "power iteration tolerance")->capture_default_str();
  cmd.add_option("--eig-max-iter", f.eig_max_iter, "power iteration cap per step; 0 = default")
      ->capture_default_str();
  cmd.add_option("--init-radius", f.init_radius, "distance of theta0 from theta*");
  cmd.add_option("--stop-tol", f.stop_tol, "gradient-norm stopping tolerance")
      ->capture_default_str();
  cmd.add_flag("--dump-data", f.dump_data, "write every dataset as CSV");
}

double parse_number(const std::string& text, const char* flag) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.empty()) {
    throw InputError(std::string(flag) + ": not a number: '" + text + "'");
  }
  return v;
}

// "0.5" applies to every algorithm; "gd=0.01,normgd=0.5" targets some.
std::map<Algorithm, double> per_algorithm(const std::vector<std::string>& items,
                                          const std::vector<Algorithm>& algorithms,
                                          const char* flag) {
  std::map<Algorithm, double> out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      const double v = parse_number(item, flag);
      for (Algorithm a : algorithms) out[a] = v;
    } else {
      out[parse_algorithm(item.substr(0, eq))] = parse_number(item.substr(eq + 1), flag);
    }
  }
  return out;
}

ExperimentSpec resolve(const ExperimentFlags& f, bool grid) {
  ExperimentSpec spec = default_spec(parse_model(f.model), parse_regime(f.regime));
  if (f.p) spec.p = *f.p;
  if (f.sigma) spec.sigma = *f.sigma;
  if (!f.theta_star.empty()) {
    spec.theta_star = ParamVector(f.theta_star);
    spec.d = f.theta_star.size();
    if (f.d && *f.d != spec.d) {
      throw InputError("--d " + std::to_string(*f.d) + " disagrees with --theta-star length " +
                       std::to_string(spec.d));
    }
  } else if (f.d && *f.d != spec.d) {
    if (spec.regime == Regime::kStrong) {
      throw InputError("--d differs from the default; give --theta-star for the strong regime");
    }
    spec.d = *f.d;
    spec.theta_star = ParamVector(spec.d);
  }
  if (grid) {
    if (!f.n_grid.empty()) spec.n_grid = f.n_grid;
  } else {
    spec.n_grid = {f.n ? *f.n : default_convergence_n(spec.model)};
  }
  if (f.repeats) spec.repeats = *f.repeats;
  if (!f.algorithms.empty()) {
    spec.algorithms.clear();
    for (const auto& name : f.algorithms) {
      const Algorithm a = parse_algorithm(name);
      if (std::find(spec.algorithms.begin(), spec.algorithms.end(), a) != spec.algorithms.end()) {
        throw InputError("--algorithms lists " + name + " twice");
      }
      spec.algorithms.push_back(a);
    }
  }
  spec.seed = f.seed;
  spec.jobs = f.jobs;
  spec.eig_backend = parse_eig_backend(f.eig_backend);
  spec.eig_tol = f.eig_tol;
  spec.eig_max_iter = f.eig_max_iter;
  spec.stop_tol = f.stop_tol;
  if (f.init_radius) spec.init_radius = *f.init_radius;
  for (auto [a, v] : per_algorithm(f.eta, spec.algorithms, "--eta")) spec.overrides[a].eta = v;
  for (auto [a, v] : per_algorithm(f.max_iter, spec.algorithms, "--max-iter")) {
    if (!(v >= 1.0) || v != std::floor(v)) throw InputError("--max-iter must be a positive integer");
    spec.overrides[a].max_iter = static_cast<std::size_t>(v);
  }
  return spec;
}

std::filesystem::path output_dir(const ExperimentFlags& f, const std::string& command) {
  if (!f.out.empty()) return f.out;
  const char* root = std::getenv(kOutRootEnv);
  const std::filesystem::path base = (root && *root) ? root : "runs";
  return base / (command + "-" + f.model + "-" + f.regime + "-seed" + std::to_string(f.seed));
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

int converge(const ExperimentFlags& f, std::ostream& out) {
  ExperimentSpec spec = resolve(f, false);
  if (f.algorithms.empty()) spec.algorithms = {Algorithm::kNormGd, Algorithm::kGd};
  spec.validate(false);
  const auto dir = output_dir(f, "converge");
  const ConvergenceResult result = convergence_experiment(spec);
  write_convergence_outputs(dir, spec, result);
  if (f.dump_data) write_datasets(dir, spec);

  out << "algorithm\tn\trepeats\tmean_min_error\tmean_error_iter100\tmean_final_error\t"
         "mean_iterations\tdegenerate\n";
  for (Algorithm a : spec.algorithms) {
    const auto& traces = result.traces.at(a);
    const auto curve = mean_error_curve(traces);
    double min_sum = 0, final_sum = 0, iter_sum = 0;
    std::size_t degenerate = 0;
    for (const auto& t : traces) {
      min_sum += t.min_error;
      final_sum += t.final_error;
      iter_sum += static_cast<double>(t.iterations);
      if (t.status == RunStatus::kDegenerateCurvature) ++degenerate;
    }
    const double k = static_cast<double>(traces.size());
    const double e100 = curve.empty() ? NAN : curve[std::min<std::size_t>(100, curve.size() - 1)];
    out << to_string(a) << '\t' << result.n << '\t' << traces.size() << '\t' << num(min_sum / k)
        << '\t' << num(e100) << '\t' << num(final_sum / k) << '\t' << num(iter_sum / k) << '\t'
        << degenerate << '\n';
  }
  out << "output\t" << dir.string() << '\n';
  return kExitOk;
}

int slope(const ExperimentFlags& f, std::ostream& out) {
  ExperimentSpec spec = resolve(f, true);
  spec.validate(true);
  const auto dir = output_dir(f, "slope");
  const auto results = slope_experiment(spec);
  write_slope_outputs(dir, spec, results);
  if (f.dump_data) write_datasets(dir, spec);

  out << "algorithm\tregime\tstatistic\tslope\tr2\texcluded\n";
  for (const auto& [a, r] : results) {
    out << to_string(a) << '\t' << to_string(r.regime) << '\t' << to_string(r.statistic) << '\t'
        << num(r.fit.slope) << '\t' << num(r.fit.r_squared) << '\t' << r.excluded_runs << '\n';
  }
  out << "n\talgorithm\tmean_error\n";
  for (const auto& [a, r] : results) {
    for (std::size_t i = 0; i < r.n_grid.size(); ++i) {
      out << r.n_grid[i] << '\t' << to_string(a) << '\t' << num(r.mean_errors[i]) << '\n';
    }
  }
  out << "output\t" << dir.string() << '\n';
  return kExitOk;
}

int scaling(const ExperimentFlags& f, std::ostream& out) {
  ExperimentSpec spec = resolve(f, true);
  if (f.algorithms.empty()) spec.algorithms = {Algorithm::kNormGd, Algorithm::kGd};
  if (spec.regime != Regime::kLow) throw InputError("scaling needs --regime low");
  spec.validate(true);
  if (!(f.radius_multiplier > 0.0)) throw InputError("--radius-multiplier must be > 0");
  const auto dir = output_dir(f, "scaling");
  RadiusRule rule;
  rule.multiplier = f.radius_multiplier;
  const ScalingResult result = iteration_scaling_study(spec, rule);
  write_scaling_outputs(dir, spec, result);
  if (f.dump_data) write_datasets(dir, spec);

  out << "n\talgorithm\tradius\tmean_iterations\tcensored\n";
  for (const auto& row : result.rows) {
    out << row.n << '\t' << to_string(row.algorithm) << '\t' << num(row.radius) << '\t'
        << num(row.mean_iterations) << '\t' << row.censored << '\n';
  }
  out << "output\t" << dir.string() << '\n';
  return kExitOk;
}

int check(const std::vector<std::string>& only, std::uint64_t seed, std::size_t instances,
          std::ostream& out, std::ostream& err, const CheckSubject& subject) {
  CheckOptions options;
  options.seed = seed;
  options.instances = instances;
  for (const auto& s : only) options.only.insert(s);
  const auto results = run_checks(options, subject);
  out << "suite\tproperty\tstatus\tdetail\n";
  std::vector<std::string> failed;
  for (const auto& r : results) {
    out << r.suite << '\t' << r.property << '\t' << (r.passed ? "pass" : "FAIL") << '\t'
        << r.detail << '\n';
    if (!r.passed) failed.push_back(r.property);
  }
  if (failed.empty()) return kExitOk;
  err << "check failed:";
  for (const auto& name : failed) err << ' ' << name;
  err << '\n';
  return kExitFailure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  return run(args, out, err, CheckSubject{});
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const CheckSubject& subject) {
  CLI::App app{"Normalized gradient descent experiments", "normgd"};
  app.require_subcommand(1);

  ExperimentFlags conv_flags, slope_flags, scale_flags;
  auto* conv_cmd = app.add_subcommand("converge", "per-iteration error curves at one n");
  add_experiment_flags(*conv_cmd, conv_flags, false);
  auto* slope_cmd = app.add_subcommand("slope", "log-log error vs sample size");
  add_experiment_flags(*slope_cmd, slope_flags, true);
  auto* scale_cmd = app.add_subcommand("scaling", "iterations to the statistical radius vs n");
  add_experiment_flags(*scale_cmd, scale_flags, true);
  scale_cmd->add_option("--radius-multiplier", scale_flags.radius_multiplier,
                        "radius constant as a multiple of the largest-n min error")
      ->capture_default_str();

  std::vector<std::string> only;
  std::uint64_t check_seed = 1;
  std::size_t instances = 100;
  auto* check_cmd = app.add_subcommand("check", "run the oracle suites");
  check_cmd->add_option("--only", only, "comma-separated subset of fd,eig,quadrature,em")
      ->delimiter(',')
      ->check(CLI::IsMember(check_suites()));
  check_cmd->add_option("--seed", check_seed, "seed")->capture_default_str();
  check_cmd->add_option("--instances", instances, "random instances per property")
      ->capture_default_str();

  std::vector<std::string> argv_storage{"normgd"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_storage) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (*conv_cmd) return converge(conv_flags, out);
    if (*slope_cmd) return slope(slope_flags, out);
    if (*scale_cmd) return scaling(scale_flags, out);
    if (instances == 0) throw InputError("--instances must be >= 1");
    return check(only, check_seed, instances, out, err, subject);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const UnsupportedRegime& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace normgd::cli
