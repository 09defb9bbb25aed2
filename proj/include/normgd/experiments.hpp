#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "normgd/numkit.hpp"
#include "normgd/optim.hpp"
#include "normgd/stochastics.hpp"

namespace normgd {

enum class Model { kGlm, kGmm };
enum class Regime { kStrong, kLow };
enum class ErrorStatistic { kMinOverIterates, kFinalIterate };

std::string_view to_string(Model m);
std::string_view to_string(Regime r);
std::string_view to_string(ErrorStatistic s);
Model parse_model(std::string_view name);
Regime parse_regime(std::string_view name);

/// Per-algorithm overrides on top of the model/regime defaults.
struct AlgorithmOverrides {
  std::optional<double> eta;
  std::optional<std::size_t> max_iter;
};

struct ExperimentSpec {
  Model model = Model::kGlm;
  Regime regime = Regime::kLow;
  std::size_t d = 4;
  int p = 2;
  double sigma = 1.0;
  ParamVector theta_star;
  std::vector<std::size_t> n_grid;  // single entry for convergence runs
  std::size_t repeats = 10;
  std::vector<Algorithm> algorithms{Algorithm::kNormGd};
  std::uint64_t seed = 1;
  double init_radius = 0.5;
  double stop_tol = 0.0;
  EigBackend eig_backend = EigBackend::kAuto;
  double eig_tol = 1e-8;
  std::size_t eig_max_iter = 0;
  std::map<Algorithm, AlgorithmOverrides> overrides;
  /// Trial fan-out; 0 = hardware concurrency.
  std::size_t jobs = 0;

  /// Throws InputError. `slope_study` requires a strictly increasing grid of >= 3.
  void validate(bool slope_study) const;

  /// Resolved optimizer config for one algorithm.
  OptimizerConfig optimizer(Algorithm a) const;
  /// Statistic used for slopes: min-over-iterates in low SNR, final iterate in strong.
  ErrorStatistic statistic() const;
};

/// Fills the default d, p, theta* and n grid for a model/regime.
ExperimentSpec default_spec(Model model, Regime regime);
std::vector<std::size_t> default_n_grid(Model model);
std::size_t default_convergence_n(Model model);
/// Fixed-step GD: GLM 0.0025 (stable at the strong-SNR curvature), GMM sigma^2 (EM).
double default_gd_eta(Model model, double sigma);
std::size_t default_max_iter(Algorithm a, Regime regime);

nlohmann::json to_json(const ExperimentSpec& spec);

/// theta0 for repeat `rng`: theta* + uniform direction at init_radius.
ParamVector initial_point(const ExperimentSpec& spec, Rng& rng);

/// Trial (n-index, repeat) gets its own child stream; all algorithms in a
/// trial share the dataset and theta0.
Rng trial_rng(std::uint64_t seed, std::size_t n_index, std::size_t repeat);

struct ConvergenceResult {
  std::size_t n = 0;
  std::map<Algorithm, std::vector<RunTrace>> traces;
  std::vector<std::uint64_t> dataset_hashes;  // one per repeat
};

ConvergenceResult convergence_experiment(const ExperimentSpec& spec);

struct SlopeResult {
  Algorithm algorithm = Algorithm::kNormGd;
  Regime regime = Regime::kLow;
  ErrorStatistic statistic = ErrorStatistic::kMinOverIterates;
  std::vector<std::size_t> n_grid;
  /// Mean over kept repeats of the chosen statistic.
  std::vector<double> mean_errors;
  std::vector<double> mean_min_errors;
  std::vector<double> mean_final_errors;
  /// [n index][repeat]; NaN marks an excluded run.
  std::vector<std::vector<double>> per_repeat_errors;
  std::size_t excluded_runs = 0;
  LineFit fit;  // on (ln n, ln mean_error)
};

std::map<Algorithm, SlopeResult> slope_experiment(const ExperimentSpec& spec);

struct RadiusRule {
  double multiplier = 2.0;
  /// Rate exponent in n; nullopt selects -1/(2p) for GLM and -1/4 for GMM.
  std::optional<double> exponent;
};

struct ScalingRow {
  std::size_t n = 0;
  Algorithm algorithm = Algorithm::kNormGd;
  double radius = 0.0;
  /// Mean over repeats; censored repeats count as max_iter + 1.
  double mean_iterations = 0.0;
  std::vector<std::optional<std::size_t>> per_repeat;
  std::size_t censored = 0;
};

struct ScalingResult {
  double radius_constant = 0.0;  // c in c * n^exponent
  double exponent = 0.0;
  std::vector<ScalingRow> rows;

  const ScalingRow& row(std::size_t n, Algorithm a) const;
};

/// Iterations to the regime's theoretical radius c n^exponent, with c
/// calibrated as multiplier x the mean NormGD min error at the largest n.
ScalingResult iteration_scaling_study(const ExperimentSpec& spec, const RadiusRule& rule = {});

/// 16 lowercase hex digits.
std::string format_hash(std::uint64_t hash);

/// Mean error curve across repeats, padded with the last value.
std::vector<double> mean_error_curve(const std::vector<RunTrace>& traces);

// Persistence: one directory per experiment.
void write_convergence_outputs(const std::filesystem::path& dir, const ExperimentSpec& spec,
                               const ConvergenceResult& result);
void write_slope_outputs(const std::filesystem::path& dir, const ExperimentSpec& spec,
                         const std::map<Algorithm, SlopeResult>& result);
void write_scaling_outputs(const std::filesystem::path& dir, const ExperimentSpec& spec,
                           const ScalingResult& result);
/// data/n<n>_rep<k>.csv for every trial, drawn from the same streams the
/// experiments use.
void write_datasets(const std::filesystem::path& dir, const ExperimentSpec& spec);

}  // namespace normgd
