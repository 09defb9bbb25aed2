#include "normgd/optim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "normgd/errors.hpp"
#include "normgd/gmm.hpp"
#include "normgd/stochastics.hpp"

namespace normgd {

double QuadraticObjective::value(const ParamVector& theta) const {
  return 0.5 * dot(theta, h_.apply(theta));
}

ParamVector QuadraticObjective::gradient(const ParamVector& theta) const {
  return h_.apply(theta);
}

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::kNormGd: return "normgd";
    case Algorithm::kGd: return "gd";
    case Algorithm::kEm: return "em";
  }
  return "?";
}

std::string_view to_string(EigBackend b) {
  switch (b) {
    case EigBackend::kAuto: return "auto";
    case EigBackend::kExact: return "exact";
    case EigBackend::kPower: return "power";
  }
  return "?";
}

std::string_view to_string(RunStatus s) {
  switch (s) {
    case RunStatus::kMaxIter: return "max_iter";
    case RunStatus::kGradTol: return "grad_tol";
    case RunStatus::kRadius: return "radius";
    case RunStatus::kDegenerateCurvature: return "degenerate_curvature";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view name) {
  if (name == "normgd") return Algorithm::kNormGd;
  if (name == "gd") return Algorithm::kGd;
  if (name == "em") return Algorithm::kEm;
  throw InputError("unknown algorithm '" + std::string(name) + "' (normgd|gd|em)");
}

EigBackend parse_eig_backend(std::string_view name) {
  if (name == "auto") return EigBackend::kAuto;
  if (name == "exact") return EigBackend::kExact;
  if (name == "power") return EigBackend::kPower;
  throw InputError("unknown eigen backend '" + std::string(name) + "' (auto|exact|power)");
}

void OptimizerConfig::validate() const {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw InputError("eta must be finite and > 0");
  if (!(stop_tol >= 0.0)) throw InputError("stop_tol must be >= 0");
  if (stop_radius && !(*stop_radius >= 0.0)) throw InputError("stop_radius must be >= 0");
  if (!(eig_tol > 0.0)) throw InputError("eig_tol must be > 0");
}

double lambda_max(const SymMatrix& h, EigBackend backend, double eig_tol, Rng& rng,
                  std::size_t eig_max_iter) {
  constexpr std::size_t kExactLimit = 16;
  if (backend == EigBackend::kAuto) {
    backend = h.dim() <= kExactLimit ? EigBackend::kExact : EigBackend::kPower;
  }
  if (backend == EigBackend::kExact) return sym_eig_max(h);

  PowerOptions opts;
  opts.tol = eig_tol;
  opts.max_iter = eig_max_iter > 0
                      ? eig_max_iter
                      : kOptimizerPowerCapFactor * default_power_max_iter(h.dim(), eig_tol);
  const EigResult r = power_iteration(h, opts, rng);
  if (!r.converged) {
    throw NumericalError("power iteration did not converge in " + std::to_string(r.iterations) +
                         " iterations");
  }
  return r.value;
}

double curvature_floor(const SymMatrix& h) {
  return 1e-12 * std::max(1.0, h.max_abs_row_sum());
}

NormGdStep normgd_step(const Objective& obj, const ParamVector& theta, double eta,
                       EigBackend backend, double eig_tol, Rng& rng,
                       std::size_t eig_max_iter) {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw InputError("normgd_step: eta must be > 0");
  const SymMatrix h = obj.hessian(theta);
  const double lambda = lambda_max(h, backend, eig_tol, rng, eig_max_iter);
  const double floor = curvature_floor(h);
  if (!(lambda > floor)) throw DegenerateCurvature(lambda, floor);
  ParamVector g = obj.gradient(theta);
  g *= eta / lambda;
  return {theta - g, lambda};
}

NormGdStep normgd_step(const Objective& obj, const ParamVector& theta, double eta,
                       EigBackend backend, double eig_tol) {
  Rng rng(0x5eed);
  return normgd_step(obj, theta, eta, backend, eig_tol, rng);
}

ParamVector gd_step(const Objective& obj, const ParamVector& theta, double eta) {
  if (!(eta > 0.0)) throw InputError("gd_step: eta must be > 0");
  ParamVector g = obj.gradient(theta);
  g *= eta;
  return theta - g;
}

RunTrace run(const Objective& obj, const ParamVector& theta0, const OptimizerConfig& cfg,
             const std::optional<ParamVector>& theta_star) {
  cfg.validate();
  if (theta0.size() != obj.dim()) throw InputError("run: theta0 has the wrong dimension");
  if (theta_star && theta_star->size() != obj.dim()) {
    throw InputError("run: theta_star has the wrong dimension");
  }
  if (cfg.stop_radius && !theta_star) throw InputError("run: stop_radius needs theta_star");
  const auto* gmm = dynamic_cast<const GmmObjective*>(&obj);
  if (cfg.algorithm == Algorithm::kEm && gmm == nullptr) {
    throw InputError("run: em is only defined for the Gaussian mixture objective");
  }

  const auto start = std::chrono::steady_clock::now();
  Rng eig_rng(cfg.eig_seed);
  RunTrace trace;
  trace.min_error = std::numeric_limits<double>::infinity();

  ParamVector theta = theta0;
  auto record = [&](std::size_t t, bool force_iterate) {
    if (t < kDenseIterateLimit || t % kThinStride == 0 || force_iterate) {
      trace.iterates.push_back(theta);
      trace.iterate_index.push_back(t);
    }
    if (theta_star) {
      const double e = distance(theta, *theta_star);
      trace.errors.push_back(e);
      if (e < trace.min_error) {
        trace.min_error = e;
        trace.min_error_iter = t;
      }
    }
  };
  auto reached_radius = [&] {
    return cfg.stop_radius && !trace.errors.empty() && trace.errors.back() <= *cfg.stop_radius;
  };

  record(0, false);
  std::size_t t = 0;
  bool stopped = false;
  if (reached_radius()) {
    trace.status = RunStatus::kRadius;
    stopped = true;
  }
  while (!stopped && t < cfg.max_iter) {
    const ParamVector g = obj.gradient(theta);
    const double gnorm = norm(g);
    trace.grad_norms.push_back(gnorm);
    if (gnorm <= cfg.stop_tol) {
      trace.status = RunStatus::kGradTol;
      stopped = true;
      break;
    }
    switch (cfg.algorithm) {
      case Algorithm::kNormGd: {
        const SymMatrix h = obj.hessian(theta);
        const double lambda = lambda_max(h, cfg.eig_backend, cfg.eig_tol, eig_rng, cfg.eig_max_iter);
        if (!(lambda > curvature_floor(h))) {
          trace.status = RunStatus::kDegenerateCurvature;
          trace.degenerate_lambda = lambda;
          stopped = true;
          break;
        }
        trace.lambda_max_seq.push_back(lambda);
        ParamVector step = g;
        step *= cfg.eta / lambda;
        theta -= step;
        break;
      }
      case Algorithm::kGd: {
        ParamVector step = g;
        step *= cfg.eta;
        theta -= step;
        break;
      }
      case Algorithm::kEm:
        theta = gmm->em_update(theta);
        break;
    }
    if (stopped) break;
    ++t;
    record(t, t == cfg.max_iter);
    if (reached_radius()) {
      trace.status = RunStatus::kRadius;
      stopped = true;
    }
  }
  if (!stopped) {
    trace.grad_norms.push_back(norm(obj.gradient(theta)));
    trace.status = RunStatus::kMaxIter;
  }
  if (trace.iterate_index.back() != t) {
    trace.iterates.push_back(theta);
    trace.iterate_index.push_back(t);
  }
  trace.iterations = t;
  if (theta_star) {
    trace.final_error = trace.errors.back();
  } else {
    trace.min_error = 0.0;
  }
  trace.wall_time = std::chrono::steady_clock::now() - start;
  return trace;
}

std::optional<std::size_t> iterations_to_radius(const RunTrace& trace, double radius) {
  for (std::size_t t = 0; t < trace.errors.size(); ++t) {
    if (trace.errors[t] <= radius) return t;
  }
  return std::nullopt;
}

void write_trace_csv(std::ostream& out, const RunTrace& trace) {
  out << "iter,error,grad_norm,lambda_max\n";
  const std::size_t rows = std::max(trace.errors.size(), trace.grad_norms.size());
  char buf[32];
  auto cell = [&](const std::vector<double>& v, std::size_t t) {
    if (t < v.size()) {
      std::snprintf(buf, sizeof buf, "%.17g", v[t]);
      out << buf;
    }
  };
  for (std::size_t t = 0; t < rows; ++t) {
    out << t << ',';
    cell(trace.errors, t);
    out << ',';
    cell(trace.grad_norms, t);
    out << ',';
    cell(trace.lambda_max_seq, t);
    out << '\n';
  }
}

}  // namespace normgd
