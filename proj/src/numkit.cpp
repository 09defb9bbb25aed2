#include "normgd/numkit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "normgd/errors.hpp"
#include "normgd/stochastics.hpp"

namespace normgd {

namespace {

constexpr std::size_t kMaxJacobiDim = 64;
constexpr int kMaxSweeps = 100;

void normalize(std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  s = std::sqrt(s);
  for (double& x : v) x /= s;
}

}  // namespace

std::vector<EigenPair> sym_eig_all(const SymMatrix& a) {
  const std::size_t n = a.dim();
  if (n > kMaxJacobiDim) throw InputError("sym_eig_all supports dim <= 64");

  std::vector<double> m(a.row_major().begin(), a.row_major().end());
  std::vector<double> v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;

  auto at = [&](std::size_t i, std::size_t j) -> double& { return m[i * n + j]; };

  const double scale = a.frobenius_norm();
  bool converged = (n == 1 || scale == 0.0);
  for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += at(p, q) * at(p, q);
    if (std::sqrt(2.0 * off) <= 1e-15 * scale) {
      converged = true;
      break;
    }
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = at(p, q);
        if (apq == 0.0) continue;
        const double app = at(p, p);
        const double aqq = at(q, q);
        // Rutishauser's formulation; t is the smaller root of t^2 + 2 theta t - 1.
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);

        at(p, p) = app - t * apq;
        at(q, q) = aqq + t * apq;
        at(p, q) = at(q, p) = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          const double arp = at(r, p);
          const double arq = at(r, q);
          at(r, p) = at(p, r) = arp - s * (arq + tau * arp);
          at(r, q) = at(q, r) = arq + s * (arp - tau * arq);
        }
        for (std::size_t r = 0; r < n; ++r) {
          const double vrp = v[r * n + p];
          const double vrq = v[r * n + q];
          v[r * n + p] = vrp - s * (vrq + tau * vrp);
          v[r * n + q] = vrq + s * (vrp - tau * vrq);
        }
      }
    }
  }
  if (!converged) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += at(p, q) * at(p, q);
    if (std::sqrt(2.0 * off) > 1e-12 * scale) {
      throw NumericalError("sym_eig_all: Jacobi sweeps did not converge");
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return at(i, i) > at(j, j); });

  std::vector<EigenPair> out;
  out.reserve(n);
  for (std::size_t k : order) {
    ParamVector vec(n);
    for (std::size_t r = 0; r < n; ++r) vec[r] = v[r * n + k];
    out.push_back({at(k, k), std::move(vec)});
  }
  return out;
}

double sym_eig_max(const SymMatrix& a) { return sym_eig_all(a).front().value; }

std::size_t default_power_max_iter(std::size_t dim, double tol) {
  return 10 * dim * static_cast<std::size_t>(std::ceil(std::log(1.0 / tol)));
}

EigResult power_iteration(const LinearOperator& apply, std::size_t dim, double shift,
                          const PowerOptions& options, Rng& rng) {
  if (dim == 0) throw InputError("power_iteration: dim must be >= 1");
  if (!(options.tol > 0.0)) throw InputError("power_iteration: tol must be > 0");
  if (!(shift >= 0.0) || !std::isfinite(shift)) {
    throw InputError("power_iteration: shift must be finite and >= 0");
  }
  const std::size_t max_iter =
      options.max_iter > 0 ? options.max_iter : default_power_max_iter(dim, options.tol);

  std::vector<double> v(dim), av(dim), next(dim);
  auto random_start = [&] {
    rng.fill_normal(v);
    normalize(v);
  };
  random_start();

  EigResult result;
  for (std::size_t it = 1; it <= max_iter; ++it) {
    apply(v, av);
    // Shifted operator B = A + shift I is PSD when shift bounds the spectrum.
    double bnorm = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      next[i] = av[i] + shift * v[i];
      bnorm += next[i] * next[i];
    }
    bnorm = std::sqrt(bnorm);

    const double lambda = std::inner_product(v.begin(), v.end(), av.begin(), 0.0);
    double res = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      const double r = av[i] - lambda * v[i];
      res += r * r;
    }
    res = std::sqrt(res);

    result.value = lambda;
    result.iterations = it;
    result.residual = res;
    if (res <= options.tol * std::max(1.0, std::abs(lambda))) {
      result.converged = true;
      break;
    }
    if (bnorm <= 1e-300) {
      // Start vector fell in the null space of the shifted map.
      random_start();
      continue;
    }
    for (std::size_t i = 0; i < dim; ++i) v[i] = next[i] / bnorm;
  }
  result.vector = ParamVector(v);
  return result;
}

EigResult power_iteration(const SymMatrix& a, const PowerOptions& options, Rng& rng) {
  const double shift = a.max_abs_row_sum();
  return power_iteration(
      [&a](std::span<const double> x, std::span<double> y) { a.apply(x, y); }, a.dim(), shift,
      options, rng);
}

LineFit linfit(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw InputError("linfit: xs and ys differ in length");
  if (xs.size() < 2) throw InputError("linfit: need at least two points");
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw InputError("linfit: degenerate design (all xs equal)");

  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (syy == 0.0) {
    fit.r_squared = 1.0;
  } else {
    double ss_res = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
      ss_res += r * r;
    }
    fit.r_squared = std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
  }
  return fit;
}

}  // namespace normgd
