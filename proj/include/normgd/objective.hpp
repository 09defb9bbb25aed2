#pragma once

#include <cstddef>

#include "normgd/linalg.hpp"

namespace normgd {

/// Twice-differentiable loss f_n over R^d.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual std::size_t dim() const = 0;
  virtual double value(const ParamVector& theta) const = 0;
  virtual ParamVector gradient(const ParamVector& theta) const = 0;
  virtual SymMatrix hessian(const ParamVector& theta) const = 0;
};

/// f(theta) = 1/2 theta^T H theta. Used to pin optimizer behaviour by hand.
class QuadraticObjective final : public Objective {
 public:
  explicit QuadraticObjective(SymMatrix h) : h_(std::move(h)) {}

  std::size_t dim() const override { return h_.dim(); }
  double value(const ParamVector& theta) const override;
  ParamVector gradient(const ParamVector& theta) const override;
  SymMatrix hessian(const ParamVector&) const override { return h_; }

 private:
  SymMatrix h_;
};

/// c * f for a borrowed f. The wrapped objective must outlive this one.
class ScaledObjective final : public Objective {
 public:
  ScaledObjective(const Objective& base, double scale) : base_(base), scale_(scale) {}

  std::size_t dim() const override { return base_.dim(); }
  double value(const ParamVector& theta) const override { return scale_ * base_.value(theta); }
  ParamVector gradient(const ParamVector& theta) const override {
    return scale_ * base_.gradient(theta);
  }
  SymMatrix hessian(const ParamVector& theta) const override {
    auto h = base_.hessian(theta);
    h *= scale_;
    return h;
  }

 private:
  const Objective& base_;
  double scale_;
};

}  // namespace normgd
