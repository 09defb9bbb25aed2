#include "normgd/validation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "normgd/numkit.hpp"
#include "normgd/stochastics.hpp"

namespace normgd {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

bool wanted(const CheckOptions& opt, const std::string& suite) {
  return opt.only.empty() || opt.only.count(suite) > 0;
}

// Worst case over instances; reported as one row per property.
struct Tally {
  std::string suite;
  std::string property;
  double tolerance;
  double worst = 0.0;
  CheckResult result() const {
    return {suite, property, worst <= tolerance,
            "max error " + fmt(worst) + " (tol " + fmt(tolerance) + ")"};
  }
  void add(double err) { worst = std::isnan(err) ? INFINITY : std::max(worst, err); }
};

std::vector<double> flat(const SymMatrix& m) {
  return {m.row_major().begin(), m.row_major().end()};
}

GlmObjective random_glm(Rng& rng, int p) {
  const std::size_t d = 1 + rng.next_u64() % 4;
  const std::size_t n = 20 + rng.next_u64() % 30;
  ParamVector ts = rng.on_sphere(d, 0.5 + rng.uniform());
  return GlmObjective(sample_glm(n, d, ts, p, 0.5, rng), p);
}

GmmObjective random_gmm(Rng& rng) {
  const std::size_t d = 1 + rng.next_u64() % 4;
  const std::size_t n = 20 + rng.next_u64() % 30;
  const double sigma = 0.5 + rng.uniform();
  ParamVector ts = rng.on_sphere(d, 2.0 * rng.uniform());
  return GmmObjective(sample_gmm(n, d, ts, sigma, rng), sigma);
}

// Symmetric matrix with prescribed spectrum: V diag(lambda) V^T, V from Jacobi
// of a random symmetric matrix.
SymMatrix with_spectrum(const std::vector<double>& lambda, Rng& rng) {
  const std::size_t d = lambda.size();
  SymMatrix g(d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) g.set(i, j, rng.normal());
  const auto basis = sym_eig_all(g);
  SymMatrix a(d);
  for (std::size_t k = 0; k < d; ++k) a.add_outer(basis[k].vector.view(), lambda[k]);
  return a;
}

void fd_suite(const CheckOptions& opt, const CheckSubject& subject, std::vector<CheckResult>& out) {
  constexpr double kTol = 1e-5;
  Rng rng = Rng(opt.seed).split(1);
  Tally glm_g{"fd", "glm_grad", kTol}, glm_h{"fd", "glm_hessian", kTol};
  Tally gmm_g{"fd", "gmm_grad", kTol}, gmm_h{"fd", "gmm_hessian", kTol};
  for (std::size_t k = 0; k < opt.instances; ++k) {
    const int p = 2 + static_cast<int>(k % 2);
    const GlmObjective glm = random_glm(rng, p);
    const ParamVector theta = rng.on_sphere(glm.dim(), 0.2 + rng.uniform());
    glm_g.add(relative_error(subject.glm_grad(glm, theta).view(),
                             fd_gradient([&](const ParamVector& t) { return glm.value(t); }, theta)
                                 .view()));
    glm_h.add(relative_error(
        flat(subject.glm_hessian(glm, theta)),
        flat(fd_hessian([&](const ParamVector& t) { return subject.glm_grad(glm, t); }, theta))));

    const GmmObjective gmm = random_gmm(rng);
    const ParamVector phi = rng.on_sphere(gmm.dim(), 0.1 + 2.0 * rng.uniform());
    gmm_g.add(relative_error(subject.gmm_grad(gmm, phi).view(),
                             fd_gradient([&](const ParamVector& t) { return gmm.value(t); }, phi)
                                 .view()));
    gmm_h.add(relative_error(
        flat(subject.gmm_hessian(gmm, phi)),
        flat(fd_hessian([&](const ParamVector& t) { return subject.gmm_grad(gmm, t); }, phi))));
  }
  for (const auto* t : {&glm_g, &glm_h, &gmm_g, &gmm_h}) out.push_back(t->result());
}

void eig_suite(const CheckOptions& opt, std::vector<CheckResult>& out) {
  Rng rng = Rng(opt.seed).split(2);
  Tally recon{"eig", "sym_eig_all", 1e-9};
  Tally power{"eig", "power_iteration", 1e-8};
  std::size_t unconverged = 0;
  for (std::size_t k = 0; k < 2 * opt.instances; ++k) {
    const std::size_t d = 2 + rng.next_u64() % 15;
    // Top eigenvalue with gap >= 0.1 |lambda_1|; half the cases put a larger
    // negative eigenvalue at the bottom so magnitude and algebraic order differ.
    std::vector<double> lambda(d);
    const double top = 0.5 + 2.0 * rng.uniform();
    lambda[0] = top;
    for (std::size_t i = 1; i < d; ++i) lambda[i] = -top + 1.8 * top * rng.uniform();
    if (k % 2 == 1) lambda[d - 1] = -(1.5 + rng.uniform()) * top;
    std::sort(lambda.rbegin(), lambda.rend());
    const SymMatrix a = with_spectrum(lambda, rng);

    const auto pairs = sym_eig_all(a);
    SymMatrix rebuilt(d);
    for (const auto& pr : pairs) rebuilt.add_outer(pr.vector.view(), pr.value);
    recon.add((a - rebuilt).frobenius_norm() / a.frobenius_norm());

    const EigResult r = power_iteration(a, PowerOptions{}, rng);
    if (!r.converged) ++unconverged;
    power.add(std::abs(r.value - pairs.front().value) / std::max(1.0, std::abs(pairs.front().value)));
  }
  out.push_back(recon.result());
  auto pr = power.result();
  if (unconverged > 0) {
    pr.passed = false;
    pr.detail += ", " + std::to_string(unconverged) + " runs did not converge";
  }
  out.push_back(pr);
}

void quadrature_suite(const CheckOptions& opt, std::vector<CheckResult>& out) {
  const QuadratureRule rule = gauss_hermite(kDefaultQuadratureOrder);
  // Gaussian moments E[W^{2k}] = (2k-1)!! are exact up to degree 2*order-1.
  double worst_moment = 0.0;
  double expected = 1.0;
  for (int k = 0; k <= 10; ++k) {
    if (k > 0) expected *= (2.0 * k - 1.0);
    const double got = rule.expect_standard_normal([k](double w) { return std::pow(w, 2 * k); });
    worst_moment = std::max(worst_moment, std::abs(got - expected) / expected);
  }
  out.push_back({"quadrature", "gauss_hermite_moments", worst_moment <= 1e-12,
                 "max rel error " + fmt(worst_moment)});

  // Homogeneity band at sigma = 1 plus a Monte Carlo cross-check.
  Rng rng = Rng(opt.seed).split(3);
  constexpr std::size_t kDraws = 10'000'000;
  bool band_ok = true;
  bool mc_ok = true;
  std::string detail;
  for (double t : {0.1, 0.25, 0.5}) {
    const auto q = gmm_pop_hessian_quadrature(t, 1.0, 2, rule);
    band_ok = band_ok && q.lambda_min >= t * t / 2.0 && q.lambda_max <= 3.0 * t * t;
    double s1 = 0, s1sq = 0, s2 = 0, s2sq = 0;
    for (std::size_t i = 0; i < kDraws; ++i) {
      const double w = rng.normal();
      const double a = w * w * sech2(w * t);
      const double b = sech2(w * t);
      s1 += a, s1sq += a * a, s2 += b, s2sq += b * b;
    }
    const double n = static_cast<double>(kDraws);
    const double m1 = s1 / n, m2 = s2 / n;
    const double se1 = std::sqrt((s1sq / n - m1 * m1) / n);
    const double se2 = std::sqrt((s2sq / n - m2 * m2) / n);
    mc_ok = mc_ok && std::abs(m1 - q.b_parallel) <= 5.0 * se1 &&
            std::abs(m2 - q.b_orthogonal) <= 5.0 * se2;
    detail += "t=" + fmt(t) + " [" + fmt(q.lambda_min) + ", " + fmt(q.lambda_max) + "] ";
  }
  out.push_back({"quadrature", "gmm_pop_hessian_band", band_ok, detail});
  out.push_back({"quadrature", "gmm_pop_hessian_monte_carlo", mc_ok, "5 standard errors"});
}

void em_suite(const CheckOptions& opt, const CheckSubject& subject, std::vector<CheckResult>& out) {
  Rng rng = Rng(opt.seed).split(4);
  Tally t{"em", "em_step", 1e-12};
  for (std::size_t k = 0; k < opt.instances; ++k) {
    const GmmObjective gmm = random_gmm(rng);
    const ParamVector theta = rng.on_sphere(gmm.dim(), 3.0 * rng.uniform());
    const double s2 = gmm.sigma() * gmm.sigma();
    const ParamVector gd = theta - s2 * subject.gmm_grad(gmm, theta);
    t.add(distance(subject.em_step(gmm, theta), gd) / std::max(1.0, norm(theta)));
  }
  out.push_back(t.result());
}

}  // namespace

double relative_error(std::span<const double> a, std::span<const double> b) {
  double diff = 0.0, scale = 1.0;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
    diff = std::max(diff, std::abs(a[i] - b[i]));
    scale = std::max(scale, std::abs(b[i]));
  }
  if (a.size() != b.size()) return INFINITY;
  return diff / scale;
}

ParamVector fd_gradient(const std::function<double(const ParamVector&)>& f,
                        const ParamVector& theta) {
  const double h = 1e-5 * std::max(1.0, norm(theta));
  ParamVector g(theta.size());
  for (std::size_t j = 0; j < theta.size(); ++j) {
    ParamVector up = theta, down = theta;
    up[j] += h;
    down[j] -= h;
    g[j] = (f(up) - f(down)) / (2.0 * h);
  }
  return g;
}

SymMatrix fd_hessian(const std::function<ParamVector(const ParamVector&)>& grad,
                     const ParamVector& theta) {
  const std::size_t d = theta.size();
  const double h = 1e-5 * std::max(1.0, norm(theta));
  std::vector<double> cols(d * d);
  for (std::size_t j = 0; j < d; ++j) {
    ParamVector up = theta, down = theta;
    up[j] += h;
    down[j] -= h;
    const ParamVector gu = grad(up), gd = grad(down);
    for (std::size_t i = 0; i < d; ++i) cols[i * d + j] = (gu[i] - gd[i]) / (2.0 * h);
  }
  SymMatrix out(d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) out.set(i, j, 0.5 * (cols[i * d + j] + cols[j * d + i]));
  return out;
}

std::vector<CheckResult> run_checks(const CheckOptions& options, const CheckSubject& subject) {
  std::vector<CheckResult> out;
  if (wanted(options, "fd")) fd_suite(options, subject, out);
  if (wanted(options, "eig")) eig_suite(options, out);
  if (wanted(options, "quadrature")) quadrature_suite(options, out);
  if (wanted(options, "em")) em_suite(options, subject, out);
  return out;
}

}  // namespace normgd
