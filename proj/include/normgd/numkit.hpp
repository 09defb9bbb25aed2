#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "normgd/linalg.hpp"

namespace normgd {

class Rng;

struct EigenPair {
  double value;
  ParamVector vector;
};

/// Full symmetric eigendecomposition by cyclic Jacobi rotations.
/// Eigenvalues are sorted descending; eigenvectors are orthonormal.
/// Supports dim <= 64. Throws NumericalError if the sweep cap is hit.
std::vector<EigenPair> sym_eig_all(const SymMatrix& a);

/// Largest algebraic eigenvalue via sym_eig_all.
double sym_eig_max(const SymMatrix& a);

struct EigResult {
  double value = 0.0;
  ParamVector vector;
  std::size_t iterations = 0;
  bool converged = false;
  double residual = 0.0;
};

struct PowerOptions {
  double tol = 1e-8;
  /// 0 selects 10 * dim * ceil(log(1/tol)).
  std::size_t max_iter = 0;
};

std::size_t default_power_max_iter(std::size_t dim, double tol);

/// y = A x for a symmetric linear map A.
using LinearOperator = std::function<void(std::span<const double> x, std::span<double> y)>;

/// Power iteration on A + shift*I, reported back on A. `shift` must bound the
/// spectral radius of A from above so the shifted operator is PSD; the
/// dominant eigenvalue of the shifted map is then lambda_max(A) + shift.
/// Converged iff ||A v - lambda v|| <= tol * max(1, |lambda|).
EigResult power_iteration(const LinearOperator& apply, std::size_t dim, double shift,
                          const PowerOptions& options, Rng& rng);

/// Convenience overload: Gershgorin shift s = max_i sum_j |A_ij|.
EigResult power_iteration(const SymMatrix& a, const PowerOptions& options, Rng& rng);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Ordinary least squares y = slope * x + intercept.
LineFit linfit(std::span<const double> xs, std::span<const double> ys);

}  // namespace normgd
