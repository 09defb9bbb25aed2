#include "normgd/stochastics.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

#include "normgd/errors.hpp"

namespace normgd {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

void check_shape(std::size_t n, std::size_t d, const ParamVector& theta_star) {
  if (n == 0) throw InputError("sample size n must be >= 1");
  if (d == 0) throw InputError("dimension d must be >= 1");
  if (theta_star.size() != d) throw InputError("theta_star must have length d");
}

class Fnv1a {
 public:
  void add(std::uint64_t word) {
    for (int i = 0; i < 8; ++i) {
      hash_ ^= (word >> (8 * i)) & 0xffU;
      hash_ *= 0x100000001b3ULL;
    }
  }
  void add(double value) { add(std::bit_cast<std::uint64_t>(value)); }
  void add(std::span<const double> values) {
    for (double v : values) add(v);
  }
  std::uint64_t value() const { return hash_; }

 private:
  std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

}  // namespace

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed) : seed_(seed) {
  std::uint64_t s = seed;
  for (auto& word : state_) {
    s += kGolden;
    word = mix64(s);
  }
}

Rng Rng::split(std::uint64_t index) const {
  return Rng(mix64(seed_ ^ mix64(index ^ 0x6a09e667f3bcc909ULL)));
}

std::uint64_t Rng::next_u64() noexcept {
  // xoshiro256**
  const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double Rng::uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Rng::normal() noexcept {
  if (spare_) {
    const double z = *spare_;
    spare_.reset();
    return z;
  }
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  return radius * std::cos(angle);
}

std::vector<double> Rng::normals(std::size_t count) {
  std::vector<double> out(count);
  fill_normal(out);
  return out;
}

void Rng::fill_normal(std::span<double> out) noexcept {
  for (double& z : out) z = normal();
}

int Rng::sign() noexcept { return (next_u64() >> 63) != 0 ? 1 : -1; }

ParamVector Rng::on_sphere(std::size_t dim, double radius) {
  ParamVector v(dim);
  double n = 0.0;
  while (n == 0.0) {
    fill_normal({v.data(), dim});
    n = norm(v);
  }
  v *= radius / n;
  return v;
}

GlmDataset sample_glm(std::size_t n, std::size_t d, const ParamVector& theta_star, int p,
                      double sigma, Rng& rng) {
  check_shape(n, d, theta_star);
  if (p < 2) throw InputError("link exponent p must be >= 2");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw InputError("sigma must be finite and >= 0");

  GlmDataset data;
  data.n = n;
  data.d = d;
  data.p = p;
  data.sigma = sigma;
  data.theta_star = theta_star;
  data.x.resize(n * d);
  data.y.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::span<double> row(data.x.data() + i * d, d);
    rng.fill_normal(row);
    const double u = dot(row, theta_star.view());
    data.y[i] = ipow(u, p) + sigma * rng.normal();
  }
  return data;
}

GmmDataset sample_gmm(std::size_t n, std::size_t d, const ParamVector& theta_star,
                      double sigma, Rng& rng) {
  check_shape(n, d, theta_star);
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InputError("sigma must be finite and > 0");

  GmmDataset data;
  data.n = n;
  data.d = d;
  data.sigma = sigma;
  data.theta_star = theta_star;
  data.x.resize(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = rng.sign();
    for (std::size_t j = 0; j < d; ++j) {
      data.x[i * d + j] = s * theta_star[j] + sigma * rng.normal();
    }
  }
  return data;
}

namespace {

void write_header(std::ostream& out, std::size_t d, bool with_y) {
  for (std::size_t j = 0; j < d; ++j) out << (j ? "," : "") << "x_" << (j + 1);
  if (with_y) out << ",y";
  out << '\n';
}

void write_value(std::ostream& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out << buf;
}

}  // namespace

void write_csv(std::ostream& out, const GlmDataset& data) {
  write_header(out, data.d, true);
  for (std::size_t i = 0; i < data.n; ++i) {
    for (std::size_t j = 0; j < data.d; ++j) {
      write_value(out, data.x[i * data.d + j]);
      out << ',';
    }
    write_value(out, data.y[i]);
    out << '\n';
  }
}

void write_csv(std::ostream& out, const GmmDataset& data) {
  write_header(out, data.d, false);
  for (std::size_t i = 0; i < data.n; ++i) {
    for (std::size_t j = 0; j < data.d; ++j) {
      if (j) out << ',';
      write_value(out, data.x[i * data.d + j]);
    }
    out << '\n';
  }
}

std::uint64_t dataset_hash(const GlmDataset& data) {
  Fnv1a h;
  h.add(static_cast<std::uint64_t>(data.n));
  h.add(static_cast<std::uint64_t>(data.d));
  h.add(static_cast<std::uint64_t>(data.p));
  h.add(data.sigma);
  h.add(data.theta_star.view());
  h.add(data.x);
  h.add(data.y);
  return h.value();
}

std::uint64_t dataset_hash(const GmmDataset& data) {
  Fnv1a h;
  h.add(static_cast<std::uint64_t>(data.n));
  h.add(static_cast<std::uint64_t>(data.d));
  h.add(data.sigma);
  h.add(data.theta_star.view());
  h.add(data.x);
  return h.value();
}

}  // namespace normgd
