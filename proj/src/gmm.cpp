#include "normgd/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "normgd/errors.hpp"

namespace normgd {

namespace {

void check_dim(const GmmObjective& obj, const ParamVector& theta) {
  if (theta.size() != obj.dim()) {
    throw InputError("GMM objective: theta has length " + std::to_string(theta.size()) +
                     ", expected " + std::to_string(obj.dim()));
  }
}

}  // namespace

double log_cosh(double x) {
  const double ax = std::abs(x);
  return ax + std::log1p(std::exp(-2.0 * ax)) - std::numbers::ln2;
}

double sech2(double x) {
  if (std::abs(x) > 350.0) return 0.0;
  const double s = 2.0 / (std::exp(x) + std::exp(-x));
  return s * s;
}

GmmObjective::GmmObjective(GmmDataset data, double sigma)
    : data_(std::move(data)), sigma_(sigma), mean_sq_norm_(0.0) {
  if (!(sigma_ > 0.0) || !std::isfinite(sigma_)) throw InputError("GmmObjective: sigma must be > 0");
  if (sigma_ != data_.sigma) throw InputError("GmmObjective: sigma does not match the dataset");
  if (data_.n == 0 || data_.d == 0) throw InputError("GmmObjective: empty dataset");
  if (data_.x.size() != data_.n * data_.d) {
    throw InputError("GmmObjective: dataset array does not match n x d");
  }
  for (double v : data_.x) mean_sq_norm_ += v * v;
  mean_sq_norm_ /= static_cast<double>(data_.n);
}

GmmObjective::GmmObjective(GmmDataset data) : GmmObjective(data, data.sigma) {}

double GmmObjective::value(const ParamVector& theta) const {
  check_dim(*this, theta);
  const double s2 = sigma_ * sigma_;
  double lc = 0.0;
  for (std::size_t i = 0; i < data_.n; ++i) lc += log_cosh(dot(data_.row(i), theta.view()) / s2);
  lc /= static_cast<double>(data_.n);
  const double d = static_cast<double>(data_.d);
  return 0.5 * d * std::log(2.0 * std::numbers::pi * s2) +
         (mean_sq_norm_ + dot(theta, theta)) / (2.0 * s2) - lc;
}

ParamVector GmmObjective::em_update(const ParamVector& theta) const {
  check_dim(*this, theta);
  const double s2 = sigma_ * sigma_;
  ParamVector out(data_.d);
  for (std::size_t i = 0; i < data_.n; ++i) {
    const auto x = data_.row(i);
    const double t = std::tanh(dot(x, theta.view()) / s2);
    for (std::size_t j = 0; j < data_.d; ++j) out[j] += t * x[j];
  }
  out *= 1.0 / static_cast<double>(data_.n);
  return out;
}

ParamVector GmmObjective::gradient(const ParamVector& theta) const {
  const double s2 = sigma_ * sigma_;
  ParamVector g = theta - em_update(theta);
  g *= 1.0 / s2;
  return g;
}

SymMatrix GmmObjective::hessian(const ParamVector& theta) const {
  check_dim(*this, theta);
  const double s2 = sigma_ * sigma_;
  SymMatrix b(data_.d);
  for (std::size_t i = 0; i < data_.n; ++i) {
    const auto x = data_.row(i);
    b.add_outer(x, sech2(dot(x, theta.view()) / s2));
  }
  b *= -1.0 / (static_cast<double>(data_.n) * s2);
  b.add_identity(1.0);
  b *= 1.0 / s2;
  return b;
}

double gmm_nll(const GmmObjective& obj, const ParamVector& theta) { return obj.value(theta); }
ParamVector gmm_grad(const GmmObjective& obj, const ParamVector& theta) {
  return obj.gradient(theta);
}
SymMatrix gmm_hessian(const GmmObjective& obj, const ParamVector& theta) {
  return obj.hessian(theta);
}
ParamVector em_step(const GmmObjective& obj, const ParamVector& theta) {
  return obj.em_update(theta);
}

double QuadratureRule::expect_standard_normal(const std::function<double(double)>& f) const {
  double s = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    s += weights[i] * f(std::numbers::sqrt2 * nodes[i]);
  }
  return s / std::sqrt(std::numbers::pi);
}

QuadratureRule gauss_hermite(int order) {
  if (order < 1) throw InputError("gauss_hermite: order must be >= 1");
  if (order > kMaxQuadratureOrder) {
    throw InputError("gauss_hermite: order > " + std::to_string(kMaxQuadratureOrder) +
                     " is not supported");
  }
  const int n = order;
  const double pim4 = 1.0 / std::pow(std::numbers::pi, 0.25);

  QuadratureRule rule;
  rule.order = order;
  rule.nodes.assign(n, 0.0);
  rule.weights.assign(n, 0.0);

  double z = 0.0;
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Asymptotic starting guesses for the largest roots, then extrapolation.
    if (i == 0) {
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
    } else if (i == 1) {
      z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * rule.nodes[0];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * rule.nodes[1];
    } else {
      z = 2.0 * z - rule.nodes[i - 2];
    }

    double pp = 0.0;
    bool done = false;
    for (int it = 0; it < 100 && !done; ++it) {
      double p1 = pim4;
      double p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / j) * p2 - std::sqrt((j - 1.0) / j) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double z1 = z;
      z = z1 - p1 / pp;
      done = std::abs(z - z1) <= 1e-15 * std::max(1.0, std::abs(z));
    }
    if (!done) throw NumericalError("gauss_hermite: Newton iteration did not converge");
    if (i > 0 && !(z < rule.nodes[i - 1])) {
      throw NumericalError("gauss_hermite: Newton iteration returned a repeated node");
    }

    rule.nodes[i] = z;
    rule.nodes[n - 1 - i] = -z;
    rule.weights[i] = 2.0 / (pp * pp);
    rule.weights[n - 1 - i] = rule.weights[i];
  }
  return rule;
}

PopHessianEigs gmm_pop_hessian_quadrature(double theta_norm, double sigma, std::size_t d,
                                          const QuadratureRule& rule, double theta_star_norm) {
  if (theta_star_norm != 0.0) {
    throw UnsupportedRegime("population Hessian quadrature is only available at theta* = 0");
  }
  if (rule.order < 20) throw InputError("quadrature order must be >= 20");
  if (!(theta_norm >= 0.0)) throw InputError("theta_norm must be >= 0");
  if (!(sigma > 0.0)) throw InputError("sigma must be > 0");
  if (d == 0) throw InputError("d must be >= 1");

  const double scale = theta_norm / sigma;
  PopHessianEigs out{};
  out.b_parallel = rule.expect_standard_normal([scale](double w) { return w * w * sech2(w * scale); });
  out.b_orthogonal = rule.expect_standard_normal([scale](double w) { return sech2(w * scale); });

  const double s2 = sigma * sigma;
  const double along = (1.0 - out.b_parallel) / s2;
  const double across = (1.0 - out.b_orthogonal) / s2;
  if (d == 1) {
    out.lambda_min = out.lambda_max = along;
  } else {
    out.lambda_min = std::min(along, across);
    out.lambda_max = std::max(along, across);
  }
  return out;
}

}  // namespace normgd
