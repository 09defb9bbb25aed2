#include "normgd/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

#include "normgd/errors.hpp"
#include "normgd/glm.hpp"
#include "normgd/gmm.hpp"
#include "normgd/plot.hpp"
#include "normgd/stochastics.hpp"

namespace normgd {

namespace {

template <typename Fn>
void parallel_for(std::size_t count, std::size_t jobs, Fn&& fn) {
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min(jobs, count);
  if (jobs <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(jobs);
    for (std::size_t w = 0; w < jobs; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = count;
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

// One (n, repeat) cell: a dataset and a shared start point.
struct Trial {
  std::unique_ptr<Objective> objective;
  ParamVector theta0;
  std::uint64_t hash = 0;
};

Trial make_trial(const ExperimentSpec& spec, std::size_t n, std::size_t n_index,
                 std::size_t repeat) {
  Rng rng = trial_rng(spec.seed, n_index, repeat);
  Rng data_rng = rng.split(0);
  Rng init_rng = rng.split(1);
  Trial trial;
  if (spec.model == Model::kGlm) {
    GlmDataset data = sample_glm(n, spec.d, spec.theta_star, spec.p, spec.sigma, data_rng);
    trial.hash = dataset_hash(data);
    trial.objective = std::make_unique<GlmObjective>(std::move(data), spec.p);
  } else {
    GmmDataset data = sample_gmm(n, spec.d, spec.theta_star, spec.sigma, data_rng);
    trial.hash = dataset_hash(data);
    trial.objective = std::make_unique<GmmObjective>(std::move(data), spec.sigma);
  }
  trial.theta0 = initial_point(spec, init_rng);
  return trial;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

nlohmann::json trace_json(const RunTrace& trace, const OptimizerConfig& cfg,
                          std::uint64_t seed, std::uint64_t hash) {
  nlohmann::json j;
  j["config"] = {{"algorithm", to_string(cfg.algorithm)},
                 {"eta", cfg.eta},
                 {"max_iter", cfg.max_iter},
                 {"stop_tol", cfg.stop_tol},
                 {"eig_backend", to_string(cfg.eig_backend)},
                 {"eig_tol", cfg.eig_tol},
                 {"eig_max_iter", cfg.eig_max_iter}};
  j["seed"] = seed;
  j["dataset_hash"] = format_hash(hash);
  j["status"] = to_string(trace.status);
  j["iterations"] = trace.iterations;
  j["min_error"] = trace.min_error;
  j["min_error_iter"] = trace.min_error_iter;
  j["final_error"] = trace.final_error;
  if (trace.degenerate_lambda) j["degenerate_lambda"] = *trace.degenerate_lambda;
  j["errors"] = trace.errors;
  j["grad_norms"] = trace.grad_norms;
  j["lambda_max"] = trace.lambda_max_seq;
  j["final_iterate"] = trace.final_iterate().values();
  return j;
}

void write_trace_files(const std::filesystem::path& dir, const std::string& stem,
                       const RunTrace& trace, const OptimizerConfig& cfg, std::uint64_t seed,
                       std::uint64_t hash) {
  std::ostringstream csv;
  write_trace_csv(csv, trace);
  write_file(dir / (stem + ".csv"), csv.str());
  write_file(dir / (stem + ".json"), trace_json(trace, cfg, seed, hash).dump(2) + "\n");
}

}  // namespace

std::string format_hash(std::uint64_t hash) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

std::string_view to_string(Model m) { return m == Model::kGlm ? "glm" : "gmm"; }
std::string_view to_string(Regime r) { return r == Regime::kStrong ? "strong" : "low"; }
std::string_view to_string(ErrorStatistic s) {
  return s == ErrorStatistic::kMinOverIterates ? "min_over_iterates" : "final_iterate";
}

Model parse_model(std::string_view name) {
  if (name == "glm") return Model::kGlm;
  if (name == "gmm") return Model::kGmm;
  throw InputError("unknown model '" + std::string(name) + "' (glm|gmm)");
}

Regime parse_regime(std::string_view name) {
  if (name == "strong") return Regime::kStrong;
  if (name == "low") return Regime::kLow;
  throw InputError("unknown regime '" + std::string(name) + "' (strong|low)");
}

std::vector<std::size_t> default_n_grid(Model model) {
  if (model == Model::kGlm) return {500, 1000, 2000, 4000, 8000, 16000};
  return {1000, 2000, 4000, 8000, 16000, 32000};
}

std::size_t default_convergence_n(Model model) { return model == Model::kGlm ? 1000 : 10000; }

double default_gd_eta(Model model, double sigma) {
  return model == Model::kGlm ? 0.0025 : sigma * sigma;
}

std::size_t default_max_iter(Algorithm a, Regime regime) {
  if (a == Algorithm::kGd) return regime == Regime::kLow ? 20000 : 2000;
  return 500;
}

ExperimentSpec default_spec(Model model, Regime regime) {
  ExperimentSpec spec;
  spec.model = model;
  spec.regime = regime;
  spec.sigma = 1.0;
  if (model == Model::kGlm) {
    spec.d = 4;
    spec.p = 2;
    spec.theta_star = regime == Regime::kStrong ? ParamVector{1.0, 2.0, 3.0, 4.0} : ParamVector(4);
  } else {
    spec.d = 2;
    spec.theta_star = regime == Regime::kStrong ? ParamVector{1.0, 2.0} : ParamVector(2);
  }
  spec.n_grid = default_n_grid(model);
  return spec;
}

void ExperimentSpec::validate(bool slope_study) const {
  if (d == 0) throw InputError("d must be >= 1");
  if (theta_star.size() != d) {
    throw InputError("theta_star has length " + std::to_string(theta_star.size()) +
                     " but d = " + std::to_string(d));
  }
  if (regime == Regime::kStrong && is_zero(theta_star)) {
    throw InputError("strong regime needs theta_star != 0");
  }
  if (regime == Regime::kLow && !is_zero(theta_star)) {
    throw InputError("low regime needs theta_star = 0");
  }
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InputError("sigma must be > 0");
  if (model == Model::kGlm && p < 2) throw InputError("p must be >= 2");
  if (!(init_radius > 0.0)) throw InputError("init radius must be > 0");
  if (repeats == 0) throw InputError("repeats must be >= 1");
  if (n_grid.empty()) throw InputError("no sample size given");
  for (std::size_t n : n_grid) {
    if (n == 0) throw InputError("sample sizes must be >= 1");
  }
  if (slope_study) {
    if (n_grid.size() < 3) throw InputError("n_grid needs at least 3 sample sizes");
    for (std::size_t i = 1; i < n_grid.size(); ++i) {
      if (n_grid[i] <= n_grid[i - 1]) throw InputError("n_grid must be strictly increasing");
    }
  }
  if (algorithms.empty()) throw InputError("no algorithm selected");
  for (Algorithm a : algorithms) {
    if (a == Algorithm::kEm && model != Model::kGmm) {
      throw InputError("em is only available for the gmm model");
    }
    optimizer(a).validate();
  }
}

OptimizerConfig ExperimentSpec::optimizer(Algorithm a) const {
  OptimizerConfig cfg;
  cfg.algorithm = a;
  switch (a) {
    case Algorithm::kNormGd: cfg.eta = 0.5; break;
    case Algorithm::kGd: cfg.eta = default_gd_eta(model, sigma); break;
    case Algorithm::kEm: cfg.eta = sigma * sigma; break;
  }
  cfg.max_iter = default_max_iter(a, regime);
  cfg.stop_tol = stop_tol;
  cfg.eig_backend = eig_backend;
  cfg.eig_tol = eig_tol;
  cfg.eig_max_iter = eig_max_iter;
  if (auto it = overrides.find(a); it != overrides.end()) {
    if (it->second.eta) cfg.eta = *it->second.eta;
    if (it->second.max_iter) cfg.max_iter = *it->second.max_iter;
  }
  return cfg;
}

ErrorStatistic ExperimentSpec::statistic() const {
  return regime == Regime::kLow ? ErrorStatistic::kMinOverIterates : ErrorStatistic::kFinalIterate;
}

nlohmann::json to_json(const ExperimentSpec& spec) {
  nlohmann::json j;
  j["model"] = to_string(spec.model);
  j["regime"] = to_string(spec.regime);
  j["d"] = spec.d;
  if (spec.model == Model::kGlm) j["p"] = spec.p;
  j["sigma"] = spec.sigma;
  j["theta_star"] = spec.theta_star.values();
  j["n_grid"] = spec.n_grid;
  j["repeats"] = spec.repeats;
  j["seed"] = spec.seed;
  j["init_radius"] = spec.init_radius;
  j["statistic"] = to_string(spec.statistic());
  nlohmann::json algs = nlohmann::json::array();
  for (Algorithm a : spec.algorithms) {
    const OptimizerConfig cfg = spec.optimizer(a);
    algs.push_back({{"algorithm", to_string(a)},
                    {"eta", cfg.eta},
                    {"max_iter", cfg.max_iter},
                    {"stop_tol", cfg.stop_tol},
                    {"eig_backend", to_string(cfg.eig_backend)},
                    {"eig_tol", cfg.eig_tol},
                    {"eig_max_iter", cfg.eig_max_iter}});
  }
  j["algorithms"] = algs;
  return j;
}

ParamVector initial_point(const ExperimentSpec& spec, Rng& rng) {
  return spec.theta_star + rng.on_sphere(spec.d, spec.init_radius);
}

Rng trial_rng(std::uint64_t seed, std::size_t n_index, std::size_t repeat) {
  return Rng(seed).split(n_index).split(repeat);
}

ConvergenceResult convergence_experiment(const ExperimentSpec& spec) {
  spec.validate(false);
  if (spec.n_grid.size() != 1) throw InputError("convergence experiment takes a single n");
  const std::size_t n = spec.n_grid.front();

  ConvergenceResult result;
  result.n = n;
  result.dataset_hashes.assign(spec.repeats, 0);
  for (Algorithm a : spec.algorithms) result.traces[a].resize(spec.repeats);

  parallel_for(spec.repeats, spec.jobs, [&](std::size_t rep) {
    Trial trial = make_trial(spec, n, 0, rep);
    result.dataset_hashes[rep] = trial.hash;
    for (Algorithm a : spec.algorithms) {
      result.traces.at(a)[rep] = run(*trial.objective, trial.theta0, spec.optimizer(a), spec.theta_star);
    }
  });
  return result;
}

std::map<Algorithm, SlopeResult> slope_experiment(const ExperimentSpec& spec) {
  spec.validate(true);
  const std::size_t cells = spec.n_grid.size() * spec.repeats;
  const double nan = std::numeric_limits<double>::quiet_NaN();

  struct CellOutcome {
    double min_error = 0.0;
    double final_error = 0.0;
    bool excluded = false;
  };
  std::map<Algorithm, std::vector<CellOutcome>> outcomes;
  for (Algorithm a : spec.algorithms) outcomes[a].resize(cells);

  parallel_for(cells, spec.jobs, [&](std::size_t cell) {
    const std::size_t ni = cell / spec.repeats;
    const std::size_t rep = cell % spec.repeats;
    Trial trial = make_trial(spec, spec.n_grid[ni], ni, rep);
    for (Algorithm a : spec.algorithms) {
      const RunTrace tr = run(*trial.objective, trial.theta0, spec.optimizer(a), spec.theta_star);
      CellOutcome& out = outcomes.at(a)[cell];
      out.min_error = tr.min_error;
      out.final_error = tr.final_error;
      out.excluded = tr.status == RunStatus::kDegenerateCurvature && tr.iterations == 0;
    }
  });

  std::map<Algorithm, SlopeResult> results;
  for (Algorithm a : spec.algorithms) {
    SlopeResult r;
    r.algorithm = a;
    r.regime = spec.regime;
    r.statistic = spec.statistic();
    r.n_grid = spec.n_grid;
    std::vector<double> log_n, log_err;
    for (std::size_t ni = 0; ni < spec.n_grid.size(); ++ni) {
      std::vector<double> row(spec.repeats, nan);
      double sum_min = 0.0, sum_final = 0.0;
      std::size_t kept = 0;
      for (std::size_t rep = 0; rep < spec.repeats; ++rep) {
        const CellOutcome& out = outcomes.at(a)[ni * spec.repeats + rep];
        if (out.excluded) {
          ++r.excluded_runs;
          continue;
        }
        row[rep] = r.statistic == ErrorStatistic::kMinOverIterates ? out.min_error : out.final_error;
        sum_min += out.min_error;
        sum_final += out.final_error;
        ++kept;
      }
      if (kept == 0) {
        throw NumericalError("every run at n = " + std::to_string(spec.n_grid[ni]) +
                             " ended in degenerate curvature");
      }
      r.mean_min_errors.push_back(sum_min / kept);
      r.mean_final_errors.push_back(sum_final / kept);
      const double mean = r.statistic == ErrorStatistic::kMinOverIterates
                              ? r.mean_min_errors.back()
                              : r.mean_final_errors.back();
      if (!(mean > 0.0)) {
        throw NumericalError("mean statistical error is zero at n = " +
                             std::to_string(spec.n_grid[ni]));
      }
      r.mean_errors.push_back(mean);
      r.per_repeat_errors.push_back(std::move(row));
      log_n.push_back(std::log(static_cast<double>(spec.n_grid[ni])));
      log_err.push_back(std::log(mean));
    }
    r.fit = linfit(log_n, log_err);
    results.emplace(a, std::move(r));
  }
  return results;
}

const ScalingRow& ScalingResult::row(std::size_t n, Algorithm a) const {
  for (const auto& r : rows) {
    if (r.n == n && r.algorithm == a) return r;
  }
  throw InputError("no scaling row for n = " + std::to_string(n) + ", " + std::string(to_string(a)));
}

ScalingResult iteration_scaling_study(const ExperimentSpec& spec, const RadiusRule& rule) {
  spec.validate(false);
  if (spec.regime != Regime::kLow) throw InputError("iteration scaling study needs the low regime");
  if (!(rule.multiplier > 0.0)) throw InputError("radius multiplier must be > 0");
  for (std::size_t i = 1; i < spec.n_grid.size(); ++i) {
    if (spec.n_grid[i] <= spec.n_grid[i - 1]) throw InputError("n_grid must be strictly increasing");
  }

  std::vector<Algorithm> algs{Algorithm::kNormGd};
  for (Algorithm a : spec.algorithms) {
    if (a != Algorithm::kNormGd) algs.push_back(a);
  }
  const std::size_t ng = spec.n_grid.size();
  const std::size_t cells = ng * spec.repeats;

  // NormGD over the full horizon first; its error at the largest n calibrates c.
  std::vector<RunTrace> normgd(cells);
  const OptimizerConfig normgd_cfg = spec.optimizer(Algorithm::kNormGd);
  parallel_for(cells, spec.jobs, [&](std::size_t cell) {
    const std::size_t ni = cell / spec.repeats;
    Trial trial = make_trial(spec, spec.n_grid[ni], ni, cell % spec.repeats);
    normgd[cell] = run(*trial.objective, trial.theta0, normgd_cfg, spec.theta_star);
  });

  ScalingResult result;
  result.exponent = rule.exponent.value_or(
      spec.model == Model::kGlm ? -1.0 / (2.0 * spec.p) : -0.25);
  double largest = 0.0;
  for (std::size_t rep = 0; rep < spec.repeats; ++rep) {
    largest += normgd[(ng - 1) * spec.repeats + rep].min_error;
  }
  largest /= static_cast<double>(spec.repeats);
  const double n_max = static_cast<double>(spec.n_grid.back());
  result.radius_constant = rule.multiplier * largest / std::pow(n_max, result.exponent);
  auto radius_at = [&](std::size_t n) {
    return result.radius_constant * std::pow(static_cast<double>(n), result.exponent);
  };

  std::map<Algorithm, std::vector<std::optional<std::size_t>>> counts;
  counts[Algorithm::kNormGd].resize(cells);
  for (std::size_t cell = 0; cell < cells; ++cell) {
    counts[Algorithm::kNormGd][cell] =
        iterations_to_radius(normgd[cell], radius_at(spec.n_grid[cell / spec.repeats]));
  }
  for (std::size_t k = 1; k < algs.size(); ++k) counts[algs[k]].resize(cells);
  if (algs.size() > 1) {
    parallel_for(cells, spec.jobs, [&](std::size_t cell) {
      const std::size_t ni = cell / spec.repeats;
      Trial trial = make_trial(spec, spec.n_grid[ni], ni, cell % spec.repeats);
      for (std::size_t k = 1; k < algs.size(); ++k) {
        OptimizerConfig cfg = spec.optimizer(algs[k]);
        cfg.stop_radius = radius_at(spec.n_grid[ni]);
        const RunTrace tr = run(*trial.objective, trial.theta0, cfg, spec.theta_star);
        counts.at(algs[k])[cell] = iterations_to_radius(tr, *cfg.stop_radius);
      }
    });
  }

  for (std::size_t ni = 0; ni < ng; ++ni) {
    for (Algorithm a : algs) {
      ScalingRow row;
      row.n = spec.n_grid[ni];
      row.algorithm = a;
      row.radius = radius_at(row.n);
      const double cap = static_cast<double>(spec.optimizer(a).max_iter + 1);
      double sum = 0.0;
      for (std::size_t rep = 0; rep < spec.repeats; ++rep) {
        const auto c = counts.at(a)[ni * spec.repeats + rep];
        row.per_repeat.push_back(c);
        if (c) {
          sum += static_cast<double>(*c);
        } else {
          ++row.censored;
          sum += cap;
        }
      }
      row.mean_iterations = sum / static_cast<double>(spec.repeats);
      result.rows.push_back(std::move(row));
    }
  }
  return result;
}

std::vector<double> mean_error_curve(const std::vector<RunTrace>& traces) {
  std::size_t len = 0;
  for (const auto& t : traces) len = std::max(len, t.errors.size());
  std::vector<double> mean(len, 0.0);
  if (traces.empty()) return mean;
  for (const auto& t : traces) {
    for (std::size_t k = 0; k < len; ++k) {
      mean[k] += t.errors.empty() ? 0.0 : t.errors[std::min(k, t.errors.size() - 1)];
    }
  }
  for (double& v : mean) v /= static_cast<double>(traces.size());
  return mean;
}

void write_convergence_outputs(const std::filesystem::path& dir, const ExperimentSpec& spec,
                               const ConvergenceResult& result) {
  std::filesystem::create_directories(dir / "traces");
  nlohmann::json j = to_json(spec);
  j["experiment"] = "convergence";
  nlohmann::json hashes = nlohmann::json::array();
  for (auto h : result.dataset_hashes) hashes.push_back(format_hash(h));
  j["dataset_hashes"] = hashes;
  write_file(dir / "spec.json", j.dump(2) + "\n");

  std::ostringstream summary;
  summary << "n,algorithm,mean_error,slope,r2\n";
  plot::Figure fig;
  fig.title = std::string(to_string(spec.model)) + " " + std::string(to_string(spec.regime)) +
              " SNR, n = " + std::to_string(result.n);
  fig.x_label = "iteration";
  fig.y_label = "log10 mean error";
  for (Algorithm a : spec.algorithms) {
    const auto& traces = result.traces.at(a);
    const OptimizerConfig cfg = spec.optimizer(a);
    double mean_min = 0.0;
    for (std::size_t rep = 0; rep < traces.size(); ++rep) {
      write_trace_files(dir / "traces",
                        std::string(to_string(a)) + "_rep" + std::to_string(rep), traces[rep],
                        cfg, spec.seed, result.dataset_hashes[rep]);
      mean_min += traces[rep].min_error;
    }
    mean_min /= static_cast<double>(traces.size());
    summary << result.n << ',' << to_string(a) << ',' << format_double(mean_min) << ",,\n";

    plot::Series s;
    s.label = std::string(to_string(a));
    const auto curve = mean_error_curve(traces);
    for (std::size_t k = 0; k < curve.size(); ++k) {
      s.x.push_back(static_cast<double>(k));
      s.y.push_back(std::log10(curve[k]));
    }
    fig.series.push_back(std::move(s));
  }
  write_file(dir / "summary.csv", summary.str());
  write_file(dir / "convergence.svg", plot::render_svg(fig));
}

void write_slope_outputs(const std::filesystem::path& dir, const ExperimentSpec& spec,
                         const std::map<Algorithm, SlopeResult>& result) {
  std::filesystem::create_directories(dir);
  nlohmann::json j = to_json(spec);
  j["experiment"] = "slope";
  for (const auto& [a, r] : result) {
    j["results"][std::string(to_string(a))] = {{"slope", r.fit.slope},
                                               {"intercept", r.fit.intercept},
                                               {"r2", r.fit.r_squared},
                                               {"mean_errors", r.mean_errors},
                                               {"mean_min_errors", r.mean_min_errors},
                                               {"mean_final_errors", r.mean_final_errors},
                                               {"excluded_runs", r.excluded_runs}};
  }
  write_file(dir / "spec.json", j.dump(2) + "\n");

  std::ostringstream summary;
  summary << "n,algorithm,mean_error,slope,r2\n";
  std::ostringstream repeats;
  repeats << "n,algorithm,repeat,error\n";
  plot::Figure fig;
  fig.title = std::string(to_string(spec.model)) + " " + std::string(to_string(spec.regime)) +
              " SNR: statistical error vs sample size";
  fig.x_label = "log n";
  fig.y_label = "log error";
  std::string annotation;
  for (const auto& [a, r] : result) {
    plot::Series pts, line, scatter;
    pts.label = std::string(to_string(a)) + " mean";
    pts.markers = true;
    pts.line = false;
    scatter.label = std::string(to_string(a)) + " repeats";
    scatter.markers = true;
    scatter.line = false;
    line.label = std::string(to_string(a)) + " fit";
    for (std::size_t i = 0; i < r.n_grid.size(); ++i) {
      summary << r.n_grid[i] << ',' << to_string(a) << ',' << format_double(r.mean_errors[i])
              << ',' << format_double(r.fit.slope) << ',' << format_double(r.fit.r_squared)
              << '\n';
      const double ln = std::log(static_cast<double>(r.n_grid[i]));
      pts.x.push_back(ln);
      pts.y.push_back(std::log(r.mean_errors[i]));
      line.x.push_back(ln);
      line.y.push_back(r.fit.intercept + r.fit.slope * ln);
      for (std::size_t rep = 0; rep < r.per_repeat_errors[i].size(); ++rep) {
        const double e = r.per_repeat_errors[i][rep];
        repeats << r.n_grid[i] << ',' << to_string(a) << ',' << rep << ',' << format_double(e)
                << '\n';
        if (e > 0.0) {
          scatter.x.push_back(ln);
          scatter.y.push_back(std::log(e));
        }
      }
    }
    if (!annotation.empty()) annotation += "; ";
    annotation += std::string(to_string(a)) + " slope " + format_double(r.fit.slope) +
                  " (r2 " + format_double(r.fit.r_squared) + ")";
    fig.series.push_back(std::move(scatter));
    fig.series.push_back(std::move(pts));
    fig.series.push_back(std::move(line));
  }
  fig.annotation = annotation;
  write_file(dir / "summary.csv", summary.str());
  write_file(dir / "per_repeat.csv", repeats.str());
  write_file(dir / "slope.svg", plot::render_svg(fig));
}

void write_scaling_outputs(const std::filesystem::path& dir, const ExperimentSpec& spec,
                           const ScalingResult& result) {
  std::filesystem::create_directories(dir);
  nlohmann::json j = to_json(spec);
  j["experiment"] = "iteration_scaling";
  j["radius_constant"] = result.radius_constant;
  j["radius_exponent"] = result.exponent;
  write_file(dir / "spec.json", j.dump(2) + "\n");

  std::ostringstream csv;
  csv << "n,algorithm,radius,mean_iterations,censored\n";
  std::map<Algorithm, plot::Series> series;
  for (const auto& row : result.rows) {
    csv << row.n << ',' << to_string(row.algorithm) << ',' << format_double(row.radius) << ','
        << format_double(row.mean_iterations) << ',' << row.censored << '\n';
    auto& s = series[row.algorithm];
    s.label = std::string(to_string(row.algorithm));
    s.markers = true;
    s.x.push_back(std::log(static_cast<double>(row.n)));
    s.y.push_back(std::log10(std::max(1.0, row.mean_iterations)));
  }
  write_file(dir / "scaling.csv", csv.str());
  plot::Figure fig;
  fig.title = "iterations to reach c n^" + format_double(result.exponent);
  fig.x_label = "log n";
  fig.y_label = "log10 iterations";
  for (auto& [a, s] : series) fig.series.push_back(std::move(s));
  write_file(dir / "scaling.svg", plot::render_svg(fig));
}

void write_datasets(const std::filesystem::path& dir, const ExperimentSpec& spec) {
  std::filesystem::create_directories(dir / "data");
  for (std::size_t ni = 0; ni < spec.n_grid.size(); ++ni) {
    for (std::size_t rep = 0; rep < spec.repeats; ++rep) {
      Rng data_rng = trial_rng(spec.seed, ni, rep).split(0);
      std::ostringstream out;
      if (spec.model == Model::kGlm) {
        write_csv(out, sample_glm(spec.n_grid[ni], spec.d, spec.theta_star, spec.p, spec.sigma,
                                  data_rng));
      } else {
        write_csv(out, sample_gmm(spec.n_grid[ni], spec.d, spec.theta_star, spec.sigma, data_rng));
      }
      write_file(dir / "data" /
                     ("n" + std::to_string(spec.n_grid[ni]) + "_rep" + std::to_string(rep) + ".csv"),
                 out.str());
    }
  }
}

}  // namespace normgd
