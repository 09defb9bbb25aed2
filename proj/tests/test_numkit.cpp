#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "normgd/errors.hpp"
#include "normgd/numkit.hpp"
#include "normgd/stochastics.hpp"

using namespace normgd;

namespace {

SymMatrix random_sym(std::size_t d, Rng& rng) {
  SymMatrix a(d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) a.set(i, j, rng.normal());
  return a;
}

double reconstruction_error(const SymMatrix& a, const std::vector<EigenPair>& pairs) {
  SymMatrix r(a.dim());
  for (const auto& p : pairs) r.add_outer(p.vector.view(), p.value);
  return (a - r).frobenius_norm() / a.frobenius_norm();
}

}  // namespace

TEST_CASE("SymMatrix keeps both triangles identical") {
  SymMatrix a(3);
  a.set(0, 2, 1.5);
  CHECK(a(2, 0) == 1.5);
  a.add_outer(std::vector<double>{1.0, 2.0, 3.0}, 0.1);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) CHECK(a(i, j) == a(j, i));
  CHECK_THROWS_AS(SymMatrix(0), InputError);
  CHECK_THROWS_AS(SymMatrix::from_rows(2, {1, 2, 2.0000001, 1}), InputError);
  CHECK_NOTHROW(SymMatrix::from_rows(2, {1, 2, 2, 1}));
}

TEST_CASE("sym_eig_all on small closed cases") {
  const auto id = sym_eig_all(SymMatrix::identity(3));
  REQUIRE(id.size() == 3);
  for (const auto& p : id) CHECK(p.value == doctest::Approx(1.0).epsilon(1e-15));

  const auto diag = sym_eig_all(SymMatrix::diagonal(std::vector<double>{1.0, 3.0}));
  CHECK(diag[0].value == doctest::Approx(3.0));
  CHECK(diag[1].value == doctest::Approx(1.0));
  CHECK(std::abs(diag[0].vector[1]) == doctest::Approx(1.0));
  CHECK(std::abs(diag[1].vector[0]) == doctest::Approx(1.0));
}

TEST_CASE("sym_eig_all reconstructs random matrices with orthonormal vectors") {
  Rng rng(11);
  for (std::size_t d : {1u, 2u, 5u, 8u, 16u, 40u}) {
    const SymMatrix a = random_sym(d, rng);
    const auto pairs = sym_eig_all(a);
    CHECK(reconstruction_error(a, pairs) <= 1e-9);
    for (std::size_t i = 0; i + 1 < d; ++i) CHECK(pairs[i].value >= pairs[i + 1].value);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        const double expected = i == j ? 1.0 : 0.0;
        CHECK(std::abs(dot(pairs[i].vector, pairs[j].vector) - expected) <= 1e-10);
      }
    }
  }
}

TEST_CASE("sym_eig_all rejects dimensions beyond 64") {
  CHECK_THROWS_AS(sym_eig_all(SymMatrix::identity(65)), InputError);
}

TEST_CASE("power iteration returns the largest algebraic eigenvalue") {
  Rng rng(3);
  PowerOptions tight;
  tight.tol = 1e-10;
  const auto r = power_iteration(SymMatrix::diagonal(std::vector<double>{3.0, 1.0}), tight, rng);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(3.0).epsilon(1e-10));

  for (std::size_t d : {1u, 4u, 9u}) {
    const auto id = power_iteration(SymMatrix::identity(d), PowerOptions{}, rng);
    CHECK(id.converged);
    CHECK(id.value == doctest::Approx(1.0).epsilon(1e-12));
  }

  // Largest magnitude is -5; the algebraic maximum is 2.
  const SymMatrix indefinite = SymMatrix::diagonal(std::vector<double>{-5.0, 2.0});
  const auto ind = power_iteration(indefinite, tight, rng);
  CHECK(ind.converged);
  CHECK(ind.value == doctest::Approx(sym_eig_max(indefinite)).epsilon(1e-10));
  CHECK(ind.value == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("power iteration result invariants hold on random matrices") {
  Rng rng(5);
  for (int k = 0; k < 50; ++k) {
    const std::size_t d = 2 + k % 10;
    const SymMatrix a = random_sym(d, rng);
    PowerOptions opt;
    const auto r = power_iteration(a, opt, rng);
    CHECK(std::abs(norm(r.vector) - 1.0) <= 1e-12);
    if (r.converged) {
      const ParamVector av = a.apply(r.vector);
      CHECK(distance(av, r.value * r.vector) <= opt.tol * std::max(1.0, std::abs(r.value)) * 1.0001);
      CHECK(r.residual <= opt.tol * std::max(1.0, std::abs(r.value)));
    }
  }
}

TEST_CASE("power iteration is insensitive to the start seed once converged") {
  Rng mat_rng(21);
  for (int k = 0; k < 20; ++k) {
    std::vector<double> lambda{4.0, 2.0, 1.0, -3.0, 0.5};
    SymMatrix a(lambda.size());
    const auto basis = sym_eig_all(random_sym(lambda.size(), mat_rng));
    for (std::size_t i = 0; i < lambda.size(); ++i) a.add_outer(basis[i].vector.view(), lambda[i]);
    Rng r1(1), r2(999);
    const auto a1 = power_iteration(a, PowerOptions{}, r1);
    const auto a2 = power_iteration(a, PowerOptions{}, r2);
    REQUIRE(a1.converged);
    REQUIRE(a2.converged);
    CHECK(std::abs(a1.value - a2.value) <= 1e-8 * 4.0);
  }
}

TEST_CASE("power iteration on negative definite and invalid input") {
  Rng rng(8);
  const SymMatrix a = SymMatrix::diagonal(std::vector<double>{-1.0, -3.0});
  const auto r = power_iteration(a, PowerOptions{}, rng);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(-1.0).epsilon(1e-8));
  LinearOperator op = [&](std::span<const double> x, std::span<double> y) { a.apply(x, y); };
  CHECK_THROWS_AS(power_iteration(op, 0, 1.0, PowerOptions{}, rng), InputError);
  PowerOptions bad;
  bad.tol = 0.0;
  CHECK_THROWS_AS(power_iteration(op, 2, 3.0, bad, rng), InputError);
}

TEST_CASE("default power iteration cap") {
  CHECK(default_power_max_iter(4, 1e-8) ==
        static_cast<std::size_t>(10 * 4 * std::ceil(std::log(1e8))));
}

TEST_CASE("linfit closed cases") {
  const std::vector<double> x{0, 1, 2}, y{1, 3, 5};
  const auto fit = linfit(x, y);
  CHECK(fit.slope == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(fit.intercept == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-14));

  const auto flat = linfit(std::vector<double>{1, 2}, std::vector<double>{5, 5});
  CHECK(flat.slope == 0.0);

  std::vector<double> ln, le;
  for (double n : {500., 1000., 2000., 4000., 8000., 16000.}) {
    ln.push_back(std::log(n));
    le.push_back(std::log(3.7 * std::pow(n, -0.5)));
  }
  CHECK(linfit(ln, le).slope == doctest::Approx(-0.5).epsilon(1e-12));

  CHECK_THROWS_AS(linfit(std::vector<double>{2, 2, 2}, std::vector<double>{1, 2, 3}),
                  InputError);
  CHECK_THROWS_AS(linfit(std::vector<double>{1}, std::vector<double>{1}), InputError);
}

TEST_CASE("linfit reproduces affine data and keeps r2 in range") {
  Rng rng(4);
  for (int k = 0; k < 100; ++k) {
    const double a = rng.normal(), b = rng.normal();
    std::vector<double> xs, ys, noisy;
    for (int i = 0; i < 8; ++i) {
      xs.push_back(rng.normal());
      ys.push_back(a * xs.back() + b);
      noisy.push_back(rng.normal());
    }
    const auto fit = linfit(xs, ys);
    CHECK(std::abs(fit.slope - a) <= 1e-12 * std::max(1.0, std::abs(a)));
    CHECK(std::abs(fit.intercept - b) <= 1e-12 * std::max(1.0, std::abs(b)));
    const auto r = linfit(xs, noisy);
    CHECK(r.r_squared >= 0.0);
    CHECK(r.r_squared <= 1.0);
  }
}
