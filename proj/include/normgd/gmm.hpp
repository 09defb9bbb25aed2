#pragma once

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "normgd/objective.hpp"
#include "normgd/stochastics.hpp"

namespace normgd {

/// Overflow-safe hyperbolic helpers.
double log_cosh(double x);
double sech2(double x);

/// Negative log-likelihood of the symmetric two-component location mixture
/// 1/2 N(theta, sigma^2 I) + 1/2 N(-theta, sigma^2 I), sigma known.
class GmmObjective final : public Objective {
 public:
  /// Throws InputError if sigma != data.sigma, sigma <= 0, or the dataset is empty.
  GmmObjective(GmmDataset data, double sigma);
  explicit GmmObjective(GmmDataset data);

  const GmmDataset& data() const noexcept { return data_; }
  double sigma() const noexcept { return sigma_; }

  std::size_t dim() const override { return data_.d; }
  double value(const ParamVector& theta) const override;
  ParamVector gradient(const ParamVector& theta) const override;
  SymMatrix hessian(const ParamVector& theta) const override;

  /// theta' = 1/n sum_i X_i tanh(X_i^T theta / sigma^2)
  ParamVector em_update(const ParamVector& theta) const;

 private:
  GmmDataset data_;
  double sigma_;
  double mean_sq_norm_;  // 1/n sum ||X_i||^2
};

double gmm_nll(const GmmObjective& obj, const ParamVector& theta);
ParamVector gmm_grad(const GmmObjective& obj, const ParamVector& theta);
SymMatrix gmm_hessian(const GmmObjective& obj, const ParamVector& theta);
ParamVector em_step(const GmmObjective& obj, const ParamVector& theta);

/// Gauss-Hermite rule for the weight exp(-x^2) (physicists' convention).
/// Weights sum to sqrt(pi).
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  int order = 0;

  /// E[f(W)] for W ~ N(0, 1).
  double expect_standard_normal(const std::function<double(double)>& f) const;
};

inline constexpr int kDefaultQuadratureOrder = 40;
inline constexpr int kMaxQuadratureOrder = 150;

/// Nodes by Newton iteration on the orthonormal Hermite recurrence,
/// 1 <= order <= kMaxQuadratureOrder.
QuadratureRule gauss_hermite(int order);

struct PopHessianEigs {
  double lambda_min;
  double lambda_max;
  double b_parallel;    // E[W^2 sech^2(W ||theta|| / sigma)]
  double b_orthogonal;  // E[sech^2(W ||theta|| / sigma)]
};

/// Eigenvalues of the theta* = 0 population Hessian (1/sigma^2)(I - B), where
/// B is diagonal in a frame aligned with theta. Throws UnsupportedRegime if
/// theta_star_norm != 0 and InputError if rule.order < 20.
PopHessianEigs gmm_pop_hessian_quadrature(double theta_norm, double sigma, std::size_t d,
                                          const QuadratureRule& rule,
                                          double theta_star_norm = 0.0);

}  // namespace normgd
