#include <doctest.h>

#include <cmath>
#include <sstream>

#include "normgd/errors.hpp"
#include "normgd/experiments.hpp"
#include "normgd/glm.hpp"
#include "normgd/gmm.hpp"
#include "normgd/optim.hpp"

using namespace normgd;

namespace {

QuadraticObjective quad(std::vector<double> diag) {
  return QuadraticObjective(SymMatrix::diagonal(diag));
}

OptimizerConfig config(Algorithm a, double eta, std::size_t max_iter) {
  OptimizerConfig cfg;
  cfg.algorithm = a;
  cfg.eta = eta;
  cfg.max_iter = max_iter;
  return cfg;
}

}  // namespace

TEST_CASE("normgd_step hand cases") {
  const auto s1 = normgd_step(quad({1, 1}), ParamVector{1, 1}, 0.5);
  CHECK(s1.lambda == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(s1.theta == ParamVector{0.5, 0.5});

  const auto s2 = normgd_step(quad({2, 1}), ParamVector{1, 1}, 1.0);
  CHECK(s2.lambda == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(std::abs(s2.theta[0]) <= 1e-15);
  CHECK(s2.theta[1] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("normgd_step on a GLM instance matches its components") {
  Rng rng(1);
  const GlmObjective obj(sample_glm(300, 4, ParamVector{1, 2, 3, 4}, 2, 1.0, rng), 2);
  const ParamVector theta{1.2, 1.7, 3.1, 4.2};
  const double lambda = sym_eig_all(glm_hessian(obj, theta)).front().value;
  const ParamVector expected = theta - (0.5 / lambda) * glm_grad(obj, theta);
  for (EigBackend b : {EigBackend::kExact, EigBackend::kPower, EigBackend::kAuto}) {
    const auto s = normgd_step(obj, theta, 0.5, b, 1e-12);
    CHECK(std::abs(s.lambda - lambda) <= 1e-10 * lambda);
    CHECK(distance(s.theta, expected) <= 1e-10 * std::max(1.0, norm(expected)));
  }
}

TEST_CASE("normgd_step refuses degenerate curvature") {
  const QuadraticObjective neg(SymMatrix::diagonal(std::vector<double>{-1.0, -2.0}));
  try {
    normgd_step(neg, ParamVector{1, 1}, 0.5);
    FAIL("expected DegenerateCurvature");
  } catch (const DegenerateCurvature& e) {
    CHECK(e.lambda() == doctest::Approx(-1.0));
    CHECK(e.floor() > 0.0);
  }
  CHECK_THROWS_AS(normgd_step(quad({0, 0}), ParamVector{1, 1}, 0.5), DegenerateCurvature);
  CHECK_THROWS_AS(normgd_step(quad({1, 1}), ParamVector{1, 1}, 0.0), InputError);
}

TEST_CASE("gd_step hand cases") {
  const ParamVector theta{0.3, -2.0};
  CHECK(gd_step(quad({1, 1}), theta, 1.0) == ParamVector{0.0, 0.0});
  const QuadraticObjective flat(SymMatrix(2));
  CHECK(gd_step(flat, theta, 0.7) == theta);
  CHECK_THROWS_AS(gd_step(flat, theta, -1.0), InputError);

  Rng rng(2);
  const GmmObjective gmm(sample_gmm(100, 2, ParamVector{1, 2}, 1.3, rng), 1.3);
  const ParamVector t{0.5, 0.4};
  CHECK(distance(gd_step(gmm, t, 1.3 * 1.3), em_step(gmm, t)) <= 1e-12);
}

TEST_CASE("run from theta* with zero gradient") {
  const auto trace = run(quad({1, 2}), ParamVector(2), config(Algorithm::kNormGd, 0.5, 10),
                         ParamVector(2));
  CHECK(trace.min_error == 0.0);
  CHECK(trace.min_error_iter == 0);
  CHECK(trace.iterations == 0);
  CHECK(trace.status == RunStatus::kGradTol);
}

TEST_CASE("normgd halves the error on the identity quadratic") {
  const auto trace = run(quad({1, 1, 1}), ParamVector{1, -2, 2}, config(Algorithm::kNormGd, 0.5, 30),
                         ParamVector(3));
  REQUIRE(trace.errors.size() == 31);
  for (std::size_t t = 1; t < trace.errors.size(); ++t) {
    CHECK(trace.errors[t] == doctest::Approx(trace.errors[t - 1] / 2).epsilon(1e-14));
  }
  CHECK(trace.lambda_max_seq.size() == 30);
  CHECK(trace.grad_norms.size() == 31);
  CHECK(trace.min_error_iter == 30);
  CHECK(trace.status == RunStatus::kMaxIter);
}

TEST_CASE("normgd error is non-increasing on positive definite quadratics") {
  Rng rng(3);
  for (int k = 0; k < 30; ++k) {
    const std::size_t d = 1 + k % 6;
    std::vector<double> diag(d);
    for (auto& v : diag) v = 0.1 + 5 * rng.uniform();
    SymMatrix h = SymMatrix::diagonal(diag);
    SymMatrix g(d);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = i; j < d; ++j) g.set(i, j, rng.normal());
    SymMatrix rotated(d);
    const auto basis = sym_eig_all(g);
    for (std::size_t i = 0; i < d; ++i) rotated.add_outer(basis[i].vector.view(), diag[i]);
    const QuadraticObjective obj(rotated);
    const double eta = 0.2 + 0.8 * rng.uniform();
    const auto trace =
        run(obj, rng.on_sphere(d, 2.0), config(Algorithm::kNormGd, eta, 50), ParamVector(d));
    for (std::size_t t = 1; t < trace.errors.size(); ++t) {
      CHECK(trace.errors[t] <= trace.errors[t - 1] * (1 + 1e-12));
    }
  }
}

TEST_CASE("run matches a scripted replay on a GLM low-SNR instance") {
  Rng rng(4);
  const GlmObjective obj(sample_glm(1000, 4, ParamVector(4), 2, 1.0, rng), 2);
  const ParamVector theta0 = rng.on_sphere(4, 0.5);
  const auto cfg = config(Algorithm::kNormGd, 0.5, 200);
  const auto trace = run(obj, theta0, cfg, ParamVector(4));

  ParamVector theta = theta0;
  double best = norm(theta);
  std::size_t best_iter = 0;
  for (std::size_t t = 1; t <= 200; ++t) {
    const SymMatrix h = glm_hessian(obj, theta);
    const double lambda = sym_eig_all(h).front().value;
    REQUIRE(lambda > 0.0);
    theta = theta - (0.5 / lambda) * glm_grad(obj, theta);
    CHECK(trace.errors[t] == doctest::Approx(norm(theta)).epsilon(1e-12));
    if (norm(theta) < best) best = norm(theta), best_iter = t;
  }
  CHECK(trace.min_error == doctest::Approx(best).epsilon(1e-12));
  CHECK(trace.min_error_iter == best_iter);
}

TEST_CASE("run invariants and determinism") {
  Rng rng(5);
  const GmmObjective obj(sample_gmm(500, 2, ParamVector(2), 1.0, rng), 1.0);
  const ParamVector theta0 = rng.on_sphere(2, 0.5);
  for (Algorithm a : {Algorithm::kNormGd, Algorithm::kGd, Algorithm::kEm}) {
    const auto cfg = config(a, a == Algorithm::kNormGd ? 0.5 : 1.0, 300);
    const auto t1 = run(obj, theta0, cfg, ParamVector(2));
    const auto t2 = run(obj, theta0, cfg, ParamVector(2));
    CHECK(t1.errors == t2.errors);
    CHECK(t1.iterates == t2.iterates);
    double m = INFINITY;
    for (double e : t1.errors) {
      CHECK(e >= 0.0);
      m = std::min(m, e);
    }
    CHECK(t1.min_error == m);
    CHECK(t1.errors[t1.min_error_iter] == m);
    CHECK(t1.final_error == t1.errors.back());
    CHECK(t1.errors.size() == t1.iterations + 1);
  }
}

TEST_CASE("em needs the mixture objective and stop_radius needs theta*") {
  CHECK_THROWS_AS(run(quad({1}), ParamVector{1}, config(Algorithm::kEm, 1.0, 5)), InputError);
  auto cfg = config(Algorithm::kGd, 0.1, 5);
  cfg.stop_radius = 0.1;
  CHECK_THROWS_AS(run(quad({1}), ParamVector{1}, cfg), InputError);
  CHECK_THROWS_AS(run(quad({1}), ParamVector{1, 2}, config(Algorithm::kGd, 0.1, 5)), InputError);
  auto bad = config(Algorithm::kGd, 0.0, 5);
  CHECK_THROWS_AS(bad.validate(), InputError);
}

TEST_CASE("degenerate curvature ends the run gracefully") {
  const QuadraticObjective neg(SymMatrix::diagonal(std::vector<double>{-1.0, -2.0}));
  const auto trace = run(neg, ParamVector{1, 1}, config(Algorithm::kNormGd, 0.5, 10), ParamVector(2));
  CHECK(trace.status == RunStatus::kDegenerateCurvature);
  CHECK(trace.iterations == 0);
  REQUIRE(trace.degenerate_lambda.has_value());
  CHECK(*trace.degenerate_lambda == doctest::Approx(-1.0));
  CHECK(trace.errors.size() == 1);
}

TEST_CASE("stop radius and iterations_to_radius") {
  auto cfg = config(Algorithm::kNormGd, 0.5, 100);
  cfg.stop_radius = 0.3;
  const auto trace = run(quad({1, 1}), ParamVector{1, 0}, cfg, ParamVector(2));
  CHECK(trace.status == RunStatus::kRadius);
  CHECK(trace.iterations == 2);

  RunTrace synthetic;
  synthetic.errors = {1.0, 0.5, 0.25};
  CHECK(iterations_to_radius(synthetic, 0.3) == 2u);
  CHECK(iterations_to_radius(synthetic, 2.0) == 0u);
  CHECK_FALSE(iterations_to_radius(synthetic, 0.1).has_value());
}

TEST_CASE("iterates thin after the dense limit while errors stay dense") {
  const auto trace = run(quad({1e-6}), ParamVector{1.0}, config(Algorithm::kGd, 1.0, 10'025),
                         ParamVector(1));
  CHECK(trace.errors.size() == 10'026);
  CHECK(trace.iterate_index[kDenseIterateLimit - 1] == kDenseIterateLimit - 1);
  CHECK(trace.iterate_index[kDenseIterateLimit] == kDenseIterateLimit);
  CHECK(trace.iterate_index[kDenseIterateLimit + 1] == kDenseIterateLimit + kThinStride);
  CHECK(trace.iterate_index.back() == 10'025);
  CHECK(trace.final_iterate()[0] == doctest::Approx(trace.errors.back()).epsilon(1e-14));
}

TEST_CASE("NormGD is equivariant to rescaling the loss") {
  Rng rng(6);
  const GlmObjective glm(sample_glm(500, 4, ParamVector{1, 2, 3, 4}, 2, 1.0, rng), 2);
  const GmmObjective gmm(sample_gmm(500, 2, ParamVector(2), 1.0, rng), 1.0);
  for (const Objective* base : {static_cast<const Objective*>(&glm), static_cast<const Objective*>(&gmm)}) {
    const ScaledObjective scaled(*base, 1e3);
    const ParamVector theta0 = rng.on_sphere(base->dim(), 1.0);
    const auto cfg = config(Algorithm::kNormGd, 0.5, 100);
    const auto a = run(*base, theta0, cfg);
    const auto b = run(scaled, theta0, cfg);
    REQUIRE(a.iterates.size() == b.iterates.size());
    for (std::size_t k = 0; k < a.iterates.size(); ++k) {
      CHECK(distance(a.iterates[k], b.iterates[k]) <= 1e-10 * std::max(1.0, norm(a.iterates[k])));
    }
  }
}

TEST_CASE("exact and power backends agree on every experiment configuration") {
  for (Model m : {Model::kGlm, Model::kGmm}) {
    for (Regime r : {Regime::kStrong, Regime::kLow}) {
      ExperimentSpec spec = default_spec(m, r);
      spec.n_grid = {default_convergence_n(m)};
      spec.repeats = 2;
      spec.jobs = 1;
      spec.eig_tol = 1e-10;
      spec.eig_backend = EigBackend::kExact;
      const auto exact = convergence_experiment(spec);
      spec.eig_backend = EigBackend::kPower;
      const auto power = convergence_experiment(spec);
      for (std::size_t k = 0; k < 2; ++k) {
        CHECK(std::abs(exact.traces.at(Algorithm::kNormGd)[k].final_error -
                       power.traces.at(Algorithm::kNormGd)[k].final_error) <= 1e-6);
      }
    }
  }
}

TEST_CASE("trace CSV layout") {
  const auto trace = run(quad({1, 1}), ParamVector{1, 0}, config(Algorithm::kNormGd, 0.5, 3),
                         ParamVector(2));
  std::ostringstream out;
  write_trace_csv(out, trace);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "iter,error,grad_norm,lambda_max");
  std::getline(in, line);
  CHECK(line == "0,1,1,1");
  std::size_t rows = 1;
  std::string last;
  while (std::getline(in, line)) ++rows, last = line;
  CHECK(rows == 4);
  CHECK(last.back() == ',');
}

TEST_CASE("enum names round-trip") {
  for (Algorithm a : {Algorithm::kNormGd, Algorithm::kGd, Algorithm::kEm}) {
    CHECK(parse_algorithm(to_string(a)) == a);
  }
  for (EigBackend b : {EigBackend::kAuto, EigBackend::kExact, EigBackend::kPower}) {
    CHECK(parse_eig_backend(to_string(b)) == b);
  }
  CHECK_THROWS_AS(parse_algorithm("adam"), InputError);
  CHECK_THROWS_AS(parse_eig_backend("lanczos"), InputError);
}

TEST_CASE("power backend honours its iteration cap") {
  const SymMatrix h = SymMatrix::diagonal(std::vector<double>{1.0, 0.99, 0.5});
  Rng rng(1);
  CHECK_THROWS_AS(lambda_max(h, EigBackend::kPower, 1e-10, rng, 5), NumericalError);
  CHECK(lambda_max(h, EigBackend::kPower, 1e-10, rng) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(lambda_max(h, EigBackend::kExact, 1e-10, rng) == doctest::Approx(1.0).epsilon(1e-15));
}
