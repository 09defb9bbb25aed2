#pragma once

#include <cstdint>
#include <utility>

#include "normgd/objective.hpp"
#include "normgd/stochastics.hpp"

namespace normgd {

/// (m)!! for odd m in [1, 33].
std::uint64_t double_factorial(int m);

/// L_n(theta) = 1/(2n) sum_i (Y_i - (X_i^T theta)^p)^2.
class GlmObjective final : public Objective {
 public:
  /// Throws InputError if p != data.p or the dataset is empty.
  GlmObjective(GlmDataset data, int p);
  explicit GlmObjective(GlmDataset data);

  const GlmDataset& data() const noexcept { return data_; }
  int p() const noexcept { return p_; }

  std::size_t dim() const override { return data_.d; }
  double value(const ParamVector& theta) const override;
  ParamVector gradient(const ParamVector& theta) const override;
  SymMatrix hessian(const ParamVector& theta) const override;

 private:
  GlmDataset data_;
  int p_;
};

double glm_loss(const GlmObjective& obj, const ParamVector& theta);
ParamVector glm_grad(const GlmObjective& obj, const ParamVector& theta);
SymMatrix glm_hessian(const GlmObjective& obj, const ParamVector& theta);

/// Population least-squares loss. Closed forms exist only at theta* = 0.
struct GlmPopulation {
  int p = 2;
  double sigma = 1.0;
  ParamVector theta_star;
};

/// (sigma^2 + (2p-1)!! ||theta||^{2p}) / 2
double glm_pop_loss(const GlmPopulation& pop, const ParamVector& theta);
ParamVector glm_pop_grad(const GlmPopulation& pop, const ParamVector& theta);
SymMatrix glm_pop_hessian(const GlmPopulation& pop, const ParamVector& theta);

/// (lambda_min, lambda_max) of glm_pop_hessian. The Hessian is
/// p (2p-1)!! ||theta||^{2p-4} (||theta||^2 I + (2p-2) theta theta^T), so the
/// ratio is 2p-1. Throws InputError at theta = 0 (singular point).
std::pair<double, double> glm_pop_hessian_eigs(const GlmPopulation& pop,
                                               const ParamVector& theta);

}  // namespace normgd
