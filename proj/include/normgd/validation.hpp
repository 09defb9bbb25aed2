#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <set>
#include <string>
#include <vector>

#include "normgd/glm.hpp"
#include "normgd/gmm.hpp"

namespace normgd {

/// The functions under test. Defaults are the library implementations;
/// tests swap one out to confirm the suite catches a broken formula.
struct CheckSubject {
  std::function<ParamVector(const GlmObjective&, const ParamVector&)> glm_grad = normgd::glm_grad;
  std::function<SymMatrix(const GlmObjective&, const ParamVector&)> glm_hessian =
      normgd::glm_hessian;
  std::function<ParamVector(const GmmObjective&, const ParamVector&)> gmm_grad = normgd::gmm_grad;
  std::function<SymMatrix(const GmmObjective&, const ParamVector&)> gmm_hessian =
      normgd::gmm_hessian;
  std::function<ParamVector(const GmmObjective&, const ParamVector&)> em_step = normgd::em_step;
};

struct CheckResult {
  std::string suite;     // fd, eig, quadrature, em
  std::string property;  // e.g. glm_hessian
  bool passed = false;
  std::string detail;
};

struct CheckOptions {
  std::set<std::string> only;  // empty = all suites
  std::uint64_t seed = 1;
  std::size_t instances = 100;
};

inline const std::vector<std::string>& check_suites() {
  static const std::vector<std::string> kSuites{"fd", "eig", "quadrature", "em"};
  return kSuites;
}

std::vector<CheckResult> run_checks(const CheckOptions& options,
                                    const CheckSubject& subject = {});

/// Central differences with h = 1e-5 * max(1, ||theta||).
ParamVector fd_gradient(const std::function<double(const ParamVector&)>& f,
                        const ParamVector& theta);
SymMatrix fd_hessian(const std::function<ParamVector(const ParamVector&)>& grad,
                     const ParamVector& theta);

/// max_i |a_i - b_i| / max(1, max_i |b_i|)
double relative_error(std::span<const double> a, std::span<const double> b);

}  // namespace normgd
