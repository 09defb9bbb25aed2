#include "normgd/glm.hpp"

#include <cmath>

#include "normgd/errors.hpp"

namespace normgd {

namespace {

void check_dim(const GlmObjective& obj, const ParamVector& theta) {
  if (theta.size() != obj.dim()) {
    throw InputError("GLM objective: theta has length " + std::to_string(theta.size()) +
                     ", expected " + std::to_string(obj.dim()));
  }
}

void check_population(const GlmPopulation& pop, const ParamVector& theta) {
  if (pop.p < 2) throw InputError("GLM population: p must be >= 2");
  if (!pop.theta_star.empty() && pop.theta_star.size() != theta.size()) {
    throw InputError("GLM population: theta_star and theta differ in length");
  }
  if (!is_zero(pop.theta_star)) {
    throw UnsupportedRegime("GLM population closed form requires theta_star = 0");
  }
}

constexpr int kUseDatasetP = -1;

}  // namespace

std::uint64_t double_factorial(int m) {
  if (m < 1 || m % 2 == 0) throw InputError("double_factorial: m must be odd and >= 1");
  if (m > 33) throw InputError("double_factorial: m > 33 overflows the guard");
  std::uint64_t out = 1;
  for (int k = m; k > 1; k -= 2) out *= static_cast<std::uint64_t>(k);
  return out;
}

GlmObjective::GlmObjective(GlmDataset data, int p) : data_(std::move(data)), p_(p) {
  if (p_ == kUseDatasetP) p_ = data_.p;
  if (p_ != data_.p) throw InputError("GlmObjective: p does not match the dataset");
  if (p_ < 2) throw InputError("GlmObjective: p must be >= 2");
  if (data_.n == 0 || data_.d == 0) throw InputError("GlmObjective: empty dataset");
  if (data_.x.size() != data_.n * data_.d || data_.y.size() != data_.n) {
    throw InputError("GlmObjective: dataset arrays do not match n x d");
  }
}

GlmObjective::GlmObjective(GlmDataset data) : GlmObjective(std::move(data), kUseDatasetP) {}

double GlmObjective::value(const ParamVector& theta) const {
  check_dim(*this, theta);
  double s = 0.0;
  for (std::size_t i = 0; i < data_.n; ++i) {
    const double r = data_.y[i] - ipow(dot(data_.row(i), theta.view()), p_);
    s += r * r;
  }
  return s / (2.0 * static_cast<double>(data_.n));
}

ParamVector GlmObjective::gradient(const ParamVector& theta) const {
  check_dim(*this, theta);
  ParamVector g(data_.d);
  for (std::size_t i = 0; i < data_.n; ++i) {
    const auto x = data_.row(i);
    const double u = dot(x, theta.view());
    const double up1 = ipow(u, p_ - 1);
    const double w = p_ * (up1 * u - data_.y[i]) * up1;
    for (std::size_t j = 0; j < data_.d; ++j) g[j] += w * x[j];
  }
  g *= 1.0 / static_cast<double>(data_.n);
  return g;
}

SymMatrix GlmObjective::hessian(const ParamVector& theta) const {
  check_dim(*this, theta);
  const double a = p_ * (2.0 * p_ - 1.0);
  const double b = p_ * (p_ - 1.0);
  SymMatrix h(data_.d);
  for (std::size_t i = 0; i < data_.n; ++i) {
    const auto x = data_.row(i);
    const double u = dot(x, theta.view());
    const double up2 = ipow(u, p_ - 2);
    const double w = a * up2 * up2 * u * u - b * data_.y[i] * up2;
    h.add_outer(x, w);
  }
  h *= 1.0 / static_cast<double>(data_.n);
  return h;
}

double glm_loss(const GlmObjective& obj, const ParamVector& theta) { return obj.value(theta); }
ParamVector glm_grad(const GlmObjective& obj, const ParamVector& theta) {
  return obj.gradient(theta);
}
SymMatrix glm_hessian(const GlmObjective& obj, const ParamVector& theta) {
  return obj.hessian(theta);
}

double glm_pop_loss(const GlmPopulation& pop, const ParamVector& theta) {
  check_population(pop, theta);
  const double df = static_cast<double>(double_factorial(2 * pop.p - 1));
  return 0.5 * (pop.sigma * pop.sigma + df * ipow(norm(theta), 2 * pop.p));
}

ParamVector glm_pop_grad(const GlmPopulation& pop, const ParamVector& theta) {
  check_population(pop, theta);
  const double df = static_cast<double>(double_factorial(2 * pop.p - 1));
  return (pop.p * df * ipow(norm(theta), 2 * pop.p - 2)) * theta;
}

SymMatrix glm_pop_hessian(const GlmPopulation& pop, const ParamVector& theta) {
  check_population(pop, theta);
  const double df = static_cast<double>(double_factorial(2 * pop.p - 1));
  const double r = norm(theta);
  const double c = pop.p * df * ipow(r, 2 * pop.p - 4);
  SymMatrix h(theta.size());
  h.add_identity(c * r * r);
  h.add_outer(theta.view(), c * (2.0 * pop.p - 2.0));
  return h;
}

std::pair<double, double> glm_pop_hessian_eigs(const GlmPopulation& pop,
                                               const ParamVector& theta) {
  check_population(pop, theta);
  if (is_zero(theta)) throw InputError("glm_pop_hessian_eigs: singular point theta = 0");
  const double df = static_cast<double>(double_factorial(2 * pop.p - 1));
  const double base = pop.p * df * ipow(norm(theta), 2 * pop.p - 2);
  const double along = base * (2.0 * pop.p - 1.0);
  if (theta.size() == 1) return {along, along};
  return {base, along};
}

}  // namespace normgd
