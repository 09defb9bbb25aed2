#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace normgd {

/// x^k for k >= 0 by repeated squaring; ipow(x, 0) == 1 including x == 0.
constexpr double ipow(double x, int k) {
  double result = 1.0;
  while (k > 0) {
    if (k & 1) result *= x;
    x *= x;
    k >>= 1;
  }
  return result;
}

/// Dense parameter vector theta in R^d.
class ParamVector {
 public:
  ParamVector() = default;
  explicit ParamVector(std::size_t dim, double fill = 0.0) : data_(dim, fill) {}
  ParamVector(std::initializer_list<double> values) : data_(values) {}
  explicit ParamVector(std::vector<double> values) : data_(std::move(values)) {}

  static ParamVector unit(std::size_t dim, std::size_t axis);

  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  double* data() noexcept { return data_.data(); }
  const double* data() const noexcept { return data_.data(); }
  std::span<const double> view() const noexcept { return data_; }
  const std::vector<double>& values() const noexcept { return data_; }

  auto begin() noexcept { return data_.begin(); }
  auto end() noexcept { return data_.end(); }
  auto begin() const noexcept { return data_.begin(); }
  auto end() const noexcept { return data_.end(); }

  ParamVector& operator+=(const ParamVector& other);
  ParamVector& operator-=(const ParamVector& other);
  ParamVector& operator*=(double scale);

  bool operator==(const ParamVector&) const = default;

 private:
  std::vector<double> data_;
};

ParamVector operator+(ParamVector lhs, const ParamVector& rhs);
ParamVector operator-(ParamVector lhs, const ParamVector& rhs);
ParamVector operator-(ParamVector v);
ParamVector operator*(double scale, ParamVector v);

double dot(std::span<const double> a, std::span<const double> b);
double dot(const ParamVector& a, const ParamVector& b);
double norm(const ParamVector& v);
double distance(const ParamVector& a, const ParamVector& b);
bool is_zero(const ParamVector& v);

/// d x d symmetric matrix. Every mutator writes both triangles, so
/// entries(i, j) == entries(j, i) holds bit-for-bit.
class SymMatrix {
 public:
  explicit SymMatrix(std::size_t dim);

  /// Row-major full storage; throws InputError unless exactly symmetric.
  static SymMatrix from_rows(std::size_t dim, std::vector<double> rows);
  static SymMatrix identity(std::size_t dim);
  static SymMatrix diagonal(std::span<const double> diag);

  std::size_t dim() const noexcept { return dim_; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * dim_ + j]; }
  void set(std::size_t i, std::size_t j, double value);

  /// this += weight * x x^T
  void add_outer(std::span<const double> x, double weight);
  /// this += weight * I
  void add_identity(double weight);
  SymMatrix& operator*=(double scale);
  SymMatrix& operator+=(const SymMatrix& other);

  ParamVector apply(const ParamVector& v) const;
  void apply(std::span<const double> in, std::span<double> out) const;

  double frobenius_norm() const;
  /// max_i sum_j |A_ij|; bounds the spectral radius (Gershgorin).
  double max_abs_row_sum() const;

  std::span<const double> row_major() const noexcept { return data_; }

 private:
  std::size_t dim_;
  std::vector<double> data_;
};

SymMatrix operator-(const SymMatrix& a, const SymMatrix& b);

}  // namespace normgd
