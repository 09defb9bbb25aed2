#include "normgd/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "normgd/errors.hpp"

namespace normgd {

namespace {

void require_same_size(std::size_t a, std::size_t b) {
  if (a != b) {
    throw InputError("dimension mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
  }
}

}  // namespace

ParamVector ParamVector::unit(std::size_t dim, std::size_t axis) {
  ParamVector v(dim);
  v[axis] = 1.0;
  return v;
}

ParamVector& ParamVector::operator+=(const ParamVector& other) {
  require_same_size(size(), other.size());
  for (std::size_t i = 0; i < size(); ++i) data_[i] += other.data_[i];
  return *this;
}

ParamVector& ParamVector::operator-=(const ParamVector& other) {
  require_same_size(size(), other.size());
  for (std::size_t i = 0; i < size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

ParamVector& ParamVector::operator*=(double scale) {
  for (auto& v : data_) v *= scale;
  return *this;
}

ParamVector operator+(ParamVector lhs, const ParamVector& rhs) { return lhs += rhs; }
ParamVector operator-(ParamVector lhs, const ParamVector& rhs) { return lhs -= rhs; }
ParamVector operator-(ParamVector v) { return v *= -1.0; }
ParamVector operator*(double scale, ParamVector v) { return v *= scale; }

double dot(std::span<const double> a, std::span<const double> b) {
  require_same_size(a.size(), b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double dot(const ParamVector& a, const ParamVector& b) { return dot(a.view(), b.view()); }

double norm(const ParamVector& v) {
  return std::sqrt(dot(v, v));
}

double distance(const ParamVector& a, const ParamVector& b) {
  require_same_size(a.size(), b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    s += diff * diff;
  }
  return std::sqrt(s);
}

bool is_zero(const ParamVector& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

SymMatrix::SymMatrix(std::size_t dim) : dim_(dim), data_(dim * dim, 0.0) {
  if (dim == 0) throw InputError("SymMatrix dimension must be >= 1");
}

SymMatrix SymMatrix::from_rows(std::size_t dim, std::vector<double> rows) {
  SymMatrix m(dim);
  if (rows.size() != dim * dim) throw InputError("SymMatrix::from_rows: wrong entry count");
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = i + 1; j < dim; ++j) {
      if (rows[i * dim + j] != rows[j * dim + i]) {
        throw InputError("SymMatrix::from_rows: input is not symmetric");
      }
    }
  }
  m.data_ = std::move(rows);
  return m;
}

SymMatrix SymMatrix::identity(std::size_t dim) {
  SymMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m.data_[i * dim + i] = 1.0;
  return m;
}

SymMatrix SymMatrix::diagonal(std::span<const double> diag) {
  SymMatrix m(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m.data_[i * diag.size() + i] = diag[i];
  return m;
}

void SymMatrix::set(std::size_t i, std::size_t j, double value) {
  data_[i * dim_ + j] = value;
  data_[j * dim_ + i] = value;
}

void SymMatrix::add_outer(std::span<const double> x, double weight) {
  require_same_size(x.size(), dim_);
  for (std::size_t i = 0; i < dim_; ++i) {
    const double wi = weight * x[i];
    for (std::size_t j = i; j < dim_; ++j) data_[i * dim_ + j] += wi * x[j];
  }
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t j = i + 1; j < dim_; ++j) data_[j * dim_ + i] = data_[i * dim_ + j];
  }
}

void SymMatrix::add_identity(double weight) {
  for (std::size_t i = 0; i < dim_; ++i) data_[i * dim_ + i] += weight;
}

SymMatrix& SymMatrix::operator*=(double scale) {
  for (auto& v : data_) v *= scale;
  return *this;
}

SymMatrix& SymMatrix::operator+=(const SymMatrix& other) {
  require_same_size(dim_, other.dim_);
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
  return *this;
}

SymMatrix operator-(const SymMatrix& a, const SymMatrix& b) {
  SymMatrix out = b;
  out *= -1.0;
  out += a;
  return out;
}

ParamVector SymMatrix::apply(const ParamVector& v) const {
  ParamVector out(dim_);
  apply(v.view(), {out.data(), out.size()});
  return out;
}

void SymMatrix::apply(std::span<const double> in, std::span<double> out) const {
  require_same_size(in.size(), dim_);
  require_same_size(out.size(), dim_);
  for (std::size_t i = 0; i < dim_; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < dim_; ++j) s += data_[i * dim_ + j] * in[j];
    out[i] = s;
  }
}

double SymMatrix::frobenius_norm() const {
  double s = 0.0;
  for (double v : data_) s += v * v;
  return std::sqrt(s);
}

double SymMatrix::max_abs_row_sum() const {
  double best = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < dim_; ++j) s += std::abs(data_[i * dim_ + j]);
    best = std::max(best, s);
  }
  return best;
}

}  // namespace normgd
