#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "normgd/numkit.hpp"
#include "normgd/objective.hpp"

namespace normgd {

enum class Algorithm { kNormGd, kGd, kEm };
enum class EigBackend { kAuto, kExact, kPower };

std::string_view to_string(Algorithm a);
std::string_view to_string(EigBackend b);
Algorithm parse_algorithm(std::string_view name);
EigBackend parse_eig_backend(std::string_view name);

struct OptimizerConfig {
  Algorithm algorithm = Algorithm::kNormGd;
  double eta = 0.5;
  std::size_t max_iter = 500;
  double stop_tol = 0.0;
  /// Stop once ||theta_t - theta*|| <= stop_radius (needs theta*).
  std::optional<double> stop_radius;
  /// kAuto: Jacobi for d <= 16, shifted power iteration above.
  EigBackend eig_backend = EigBackend::kAuto;
  double eig_tol = 1e-8;
  /// Power-iteration cap per step; 0 selects kOptimizerPowerCapFactor times
  /// the numkit default. Sample Hessians near the optimum often have nearly
  /// equal top eigenvalues, which the plain default cap cannot resolve.
  std::size_t eig_max_iter = 0;
  /// Seed of the power-iteration start vectors.
  std::uint64_t eig_seed = 0x5eed;

  /// Throws InputError.
  void validate() const;
};

inline constexpr std::size_t kOptimizerPowerCapFactor = 20;

/// Largest algebraic eigenvalue of h by the selected backend. Throws
/// NumericalError if power iteration misses eig_tol within the cap.
double lambda_max(const SymMatrix& h, EigBackend backend, double eig_tol, Rng& rng,
                  std::size_t eig_max_iter = 0);

/// lambda_max at or below this triggers DegenerateCurvature.
double curvature_floor(const SymMatrix& h);

struct NormGdStep {
  ParamVector theta;
  double lambda;
};

/// theta' = theta - (eta / lambda_max(hess f(theta))) grad f(theta).
/// Throws DegenerateCurvature when lambda_max <= curvature_floor.
NormGdStep normgd_step(const Objective& obj, const ParamVector& theta, double eta,
                       EigBackend backend = EigBackend::kAuto, double eig_tol = 1e-8);
NormGdStep normgd_step(const Objective& obj, const ParamVector& theta, double eta,
                       EigBackend backend, double eig_tol, Rng& rng,
                       std::size_t eig_max_iter = 0);

ParamVector gd_step(const Objective& obj, const ParamVector& theta, double eta);

enum class RunStatus { kMaxIter, kGradTol, kRadius, kDegenerateCurvature };
std::string_view to_string(RunStatus s);

struct RunTrace {
  /// Stored iterates and the iteration each belongs to (thinned past 10^4).
  std::vector<ParamVector> iterates;
  std::vector<std::size_t> iterate_index;
  /// errors[t] = ||theta_t - theta*||, dense; empty without theta*.
  std::vector<double> errors;
  /// NormGD only; lambda_max_seq[t] is the curvature used for step t.
  std::vector<double> lambda_max_seq;
  /// grad_norms[t] = ||grad f(theta_t)||.
  std::vector<double> grad_norms;
  double min_error = 0.0;
  std::size_t min_error_iter = 0;
  double final_error = 0.0;
  std::size_t iterations = 0;  // steps taken
  RunStatus status = RunStatus::kMaxIter;
  std::optional<double> degenerate_lambda;
  std::chrono::duration<double> wall_time{0.0};

  const ParamVector& final_iterate() const { return iterates.back(); }
};

inline constexpr std::size_t kDenseIterateLimit = 10000;
inline constexpr std::size_t kThinStride = 10;

/// Iterates from theta0 until max_iter steps, ||grad|| <= stop_tol, the
/// stop radius, or degenerate curvature (which ends the run gracefully).
/// Kind kEm requires a GmmObjective.
RunTrace run(const Objective& obj, const ParamVector& theta0, const OptimizerConfig& cfg,
             const std::optional<ParamVector>& theta_star = std::nullopt);

/// First t with errors[t] <= radius.
std::optional<std::size_t> iterations_to_radius(const RunTrace& trace, double radius);

/// iter,error,grad_norm,lambda_max (empty cells where not applicable).
void write_trace_csv(std::ostream& out, const RunTrace& trace);

}  // namespace normgd
