#pragma once

// Reference computations that deliberately avoid the library's code paths:
// long-double re-summation, std::pow instead of ipow, density sums instead of
// log-cosh, and plain loops instead of the optimizer.

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "normgd/glm.hpp"
#include "normgd/gmm.hpp"

namespace oracle {

inline long double row_dot(const std::vector<double>& x, std::size_t i, std::size_t d,
                           const normgd::ParamVector& theta) {
  long double s = 0;
  for (std::size_t j = 0; j < d; ++j) s += static_cast<long double>(x[i * d + j]) * theta[j];
  return s;
}

inline double glm_loss(const normgd::GlmDataset& data, int p, const normgd::ParamVector& theta) {
  long double sum = 0;
  for (std::size_t i = 0; i < data.n; ++i) {
    const long double r = data.y[i] - std::pow(row_dot(data.x, i, data.d, theta), p);
    sum += r * r;
  }
  return static_cast<double>(sum / (2.0L * static_cast<long double>(data.n)));
}

/// -1/n sum log(1/2 phi(x; theta) + 1/2 phi(x; -theta)), direct densities.
inline double gmm_nll(const normgd::GmmDataset& data, double sigma,
                      const normgd::ParamVector& theta) {
  const long double s2 = static_cast<long double>(sigma) * sigma;
  const long double norm_const =
      std::pow(2.0L * std::numbers::pi_v<long double>* s2, -static_cast<long double>(data.d) / 2);
  long double sum = 0;
  for (std::size_t i = 0; i < data.n; ++i) {
    long double plus = 0, minus = 0;
    for (std::size_t j = 0; j < data.d; ++j) {
      const long double x = data.x[i * data.d + j];
      plus += (x - theta[j]) * (x - theta[j]);
      minus += (x + theta[j]) * (x + theta[j]);
    }
    const long double density =
        norm_const * (0.5L * std::exp(-plus / (2 * s2)) + 0.5L * std::exp(-minus / (2 * s2)));
    sum -= std::log(density);
  }
  return static_cast<double>(sum / static_cast<long double>(data.n));
}

/// Central differences, written independently of normgd::fd_gradient.
inline std::vector<double> fd_grad(const std::function<double(const normgd::ParamVector&)>& f,
                                   const normgd::ParamVector& theta, double h) {
  std::vector<double> g(theta.size());
  for (std::size_t j = 0; j < theta.size(); ++j) {
    normgd::ParamVector a = theta, b = theta;
    a[j] += h;
    b[j] -= h;
    g[j] = (f(a) - f(b)) / (2 * h);
  }
  return g;
}

inline double max_rel(const std::vector<double>& a, const std::vector<double>& b) {
  double diff = 0, scale = 1;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff = std::max(diff, std::abs(a[i] - b[i]));
    scale = std::max(scale, std::abs(b[i]));
  }
  return diff / scale;
}

/// Gauss-Hermite nodes as eigenvalues of the Jacobi matrix (Golub-Welsch),
/// diagonalised by plain QR-free bisection on the Sturm sequence.
inline std::vector<double> golub_welsch_nodes(int order) {
  std::vector<double> off(order > 0 ? order - 1 : 0);
  for (int k = 1; k < order; ++k) off[k - 1] = std::sqrt(k / 2.0);
  auto count_below = [&](double x) {
    int count = 0;
    double q = -x;  // diagonal entries are zero
    if (q < 0) ++count;
    for (int k = 1; k < order; ++k) {
      if (q == 0) q = 1e-300;
      q = -x - off[k - 1] * off[k - 1] / q;
      if (q < 0) ++count;
    }
    return count;
  };
  const double bound = 2.0 * std::sqrt(static_cast<double>(order)) + 1.0;
  std::vector<double> nodes;
  for (int k = 0; k < order; ++k) {
    double lo = -bound, hi = bound;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (count_below(mid) > k ? hi : lo) = mid;
    }
    nodes.push_back(0.5 * (lo + hi));
  }
  return nodes;
}

}  // namespace oracle
