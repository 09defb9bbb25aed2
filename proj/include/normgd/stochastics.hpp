#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "normgd/linalg.hpp"

namespace normgd {

/// SplitMix64 finalizer. Used to expand seeds and derive child streams.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seeded xoshiro256** stream with Box-Muller normals. Identical seeds give
/// identical sequences on every platform. Not thread-safe; split before
/// fanning out.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t seed() const noexcept { return seed_; }

  /// Child stream that depends only on (seed, index), never on how much of
  /// this stream has been consumed.
  Rng split(std::uint64_t index) const;

  std::uint64_t next_u64() noexcept;
  /// Uniform on [0, 1).
  double uniform() noexcept;
  double normal() noexcept;
  std::vector<double> normals(std::size_t count);
  void fill_normal(std::span<double> out) noexcept;
  /// Fair coin: +1 or -1.
  int sign() noexcept;
  /// Uniform direction on the sphere of the given radius.
  ParamVector on_sphere(std::size_t dim, double radius);

 private:
  std::uint64_t seed_;
  std::array<std::uint64_t, 4> state_{};
  std::optional<double> spare_;
};

inline Rng rng_new(std::uint64_t seed) { return Rng(seed); }
inline Rng rng_split(const Rng& r, std::uint64_t index) { return r.split(index); }
inline std::vector<double> rng_normal(Rng& r, std::size_t count) { return r.normals(count); }

/// Synthetic sample from Y = (X^T theta*)^p + eps, X ~ N(0, I_d), eps ~ N(0, sigma^2).
struct GlmDataset {
  std::size_t n = 0;
  std::size_t d = 0;
  std::vector<double> x;  // n x d, row-major
  std::vector<double> y;
  int p = 2;
  double sigma = 1.0;
  ParamVector theta_star;

  std::span<const double> row(std::size_t i) const { return {x.data() + i * d, d}; }
};

/// Synthetic sample from 1/2 N(-theta*, sigma^2 I) + 1/2 N(theta*, sigma^2 I).
struct GmmDataset {
  std::size_t n = 0;
  std::size_t d = 0;
  std::vector<double> x;  // n x d, row-major
  double sigma = 1.0;
  ParamVector theta_star;

  std::span<const double> row(std::size_t i) const { return {x.data() + i * d, d}; }
};

/// sigma = 0 is accepted here so the noiseless link can be tested directly;
/// objectives and experiments require sigma > 0.
GlmDataset sample_glm(std::size_t n, std::size_t d, const ParamVector& theta_star, int p,
                      double sigma, Rng& rng);
GmmDataset sample_gmm(std::size_t n, std::size_t d, const ParamVector& theta_star,
                      double sigma, Rng& rng);

/// Header row then one sample per line: x_1..x_d,y
void write_csv(std::ostream& out, const GlmDataset& data);
/// Header row then one sample per line: x_1..x_d
void write_csv(std::ostream& out, const GmmDataset& data);

/// FNV-1a over the raw little-endian bytes of every stored double.
std::uint64_t dataset_hash(const GlmDataset& data);
std::uint64_t dataset_hash(const GmmDataset& data);

}  // namespace normgd
