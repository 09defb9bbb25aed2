#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "normgd/cli.hpp"
#include "normgd/errors.hpp"
#include "normgd/experiments.hpp"
#include "normgd/glm.hpp"
#include "normgd/gmm.hpp"
#include "normgd/numkit.hpp"
#include "normgd/optim.hpp"
#include "normgd/validation.hpp"

namespace py = pybind11;
using namespace normgd;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

ParamVector to_vec(const Array& a) {
  if (a.ndim() != 1) throw InputError("expected a 1-d array");
  return ParamVector(std::vector<double>(a.data(), a.data() + a.size()));
}

Array from_vec(const ParamVector& v) {
  Array out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

SymMatrix to_sym(const Array& a) {
  if (a.ndim() != 2 || a.shape(0) != a.shape(1)) throw InputError("expected a square matrix");
  const auto d = static_cast<std::size_t>(a.shape(0));
  return SymMatrix::from_rows(d, std::vector<double>(a.data(), a.data() + d * d));
}

Array from_sym(const SymMatrix& m) {
  const auto d = static_cast<py::ssize_t>(m.dim());
  Array out({d, d});
  std::copy(m.row_major().begin(), m.row_major().end(), out.mutable_data());
  return out;
}

Array rows(const std::vector<double>& x, std::size_t n, std::size_t d) {
  Array out({static_cast<py::ssize_t>(n), static_cast<py::ssize_t>(d)});
  std::copy(x.begin(), x.end(), out.mutable_data());
  return out;
}

py::dict trace_dict(const RunTrace& t) {
  py::dict out;
  out["errors"] = t.errors;
  out["grad_norms"] = t.grad_norms;
  out["lambda_max"] = t.lambda_max_seq;
  out["min_error"] = t.min_error;
  out["min_error_iter"] = t.min_error_iter;
  out["final_error"] = t.final_error;
  out["iterations"] = t.iterations;
  out["status"] = std::string(to_string(t.status));
  out["final_iterate"] = from_vec(t.final_iterate());
  return out;
}

ExperimentSpec make_spec(const std::string& model, const std::string& regime,
                         std::optional<std::vector<std::size_t>> n_grid, std::size_t repeats,
                         std::uint64_t seed, const std::vector<std::string>& algorithms) {
  ExperimentSpec spec = default_spec(parse_model(model), parse_regime(regime));
  if (n_grid) spec.n_grid = *n_grid;
  spec.repeats = repeats;
  spec.seed = seed;
  spec.algorithms.clear();
  for (const auto& a : algorithms) spec.algorithms.push_back(parse_algorithm(a));
  return spec;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Normalized gradient descent for GLM and Gaussian mixture estimation";

  auto input_error = py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<UnsupportedRegime>(m, "UnsupportedRegime", PyExc_NotImplementedError);
  auto numerical = py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<DegenerateCurvature>(m, "DegenerateCurvature", numerical.ptr());
  (void)input_error;

  m.def("double_factorial", &double_factorial, py::arg("m"));

  m.def(
      "sym_eig_all",
      [](const Array& a) {
        const auto pairs = sym_eig_all(to_sym(a));
        std::vector<double> values;
        const auto d = static_cast<py::ssize_t>(pairs.size());
        Array vectors({d, d});
        auto v = vectors.mutable_unchecked<2>();
        for (py::ssize_t k = 0; k < d; ++k) {
          values.push_back(pairs[k].value);
          for (py::ssize_t i = 0; i < d; ++i) v(i, k) = pairs[k].vector[i];
        }
        return py::make_tuple(values, vectors);
      },
      py::arg("a"), "Eigenvalues (descending) and eigenvectors as columns.");

  m.def(
      "power_iteration",
      [](const Array& a, double tol, std::size_t max_iter, std::uint64_t seed) {
        Rng rng(seed);
        PowerOptions opt;
        opt.tol = tol;
        opt.max_iter = max_iter;
        const auto r = power_iteration(to_sym(a), opt, rng);
        py::dict out;
        out["value"] = r.value;
        out["vector"] = from_vec(r.vector);
        out["iterations"] = r.iterations;
        out["converged"] = r.converged;
        out["residual"] = r.residual;
        return out;
      },
      py::arg("a"), py::arg("tol") = 1e-8, py::arg("max_iter") = 0, py::arg("seed") = 0);

  m.def(
      "linfit",
      [](const std::vector<double>& xs, const std::vector<double>& ys) {
        const auto f = linfit(xs, ys);
        return py::make_tuple(f.slope, f.intercept, f.r_squared);
      },
      py::arg("xs"), py::arg("ys"), "(slope, intercept, r_squared)");

  py::class_<GlmObjective>(m, "GlmObjective")
      .def(py::init([](const Array& x, const Array& y, int p) {
             if (x.ndim() != 2 || y.ndim() != 1 || x.shape(0) != y.shape(0)) {
               throw InputError("x must be n x d and y of length n");
             }
             GlmDataset data;
             data.n = static_cast<std::size_t>(x.shape(0));
             data.d = static_cast<std::size_t>(x.shape(1));
             data.x.assign(x.data(), x.data() + x.size());
             data.y.assign(y.data(), y.data() + y.size());
             data.p = p;
             data.theta_star = ParamVector(data.d);
             return GlmObjective(std::move(data), p);
           }),
           py::arg("x"), py::arg("y"), py::arg("p"))
      .def_static(
          "sample",
          [](std::size_t n, const Array& theta_star, int p, double sigma, std::uint64_t seed) {
            Rng rng(seed);
            const ParamVector ts = to_vec(theta_star);
            return GlmObjective(sample_glm(n, ts.size(), ts, p, sigma, rng), p);
          },
          py::arg("n"), py::arg("theta_star"), py::arg("p") = 2, py::arg("sigma") = 1.0,
          py::arg("seed") = 1)
      .def_property_readonly("p", &GlmObjective::p)
      .def_property_readonly("dim", &GlmObjective::dim)
      .def_property_readonly("x", [](const GlmObjective& o) {
        return rows(o.data().x, o.data().n, o.data().d);
      })
      .def_property_readonly("y", [](const GlmObjective& o) { return o.data().y; })
      .def("loss", [](const GlmObjective& o, const Array& t) { return glm_loss(o, to_vec(t)); })
      .def("grad", [](const GlmObjective& o, const Array& t) { return from_vec(glm_grad(o, to_vec(t))); })
      .def("hessian",
           [](const GlmObjective& o, const Array& t) { return from_sym(glm_hessian(o, to_vec(t))); });

  py::class_<GmmObjective>(m, "GmmObjective")
      .def(py::init([](const Array& x, double sigma) {
             if (x.ndim() != 2) throw InputError("x must be n x d");
             GmmDataset data;
             data.n = static_cast<std::size_t>(x.shape(0));
             data.d = static_cast<std::size_t>(x.shape(1));
             data.x.assign(x.data(), x.data() + x.size());
             data.sigma = sigma;
             data.theta_star = ParamVector(data.d);
             return GmmObjective(std::move(data), sigma);
           }),
           py::arg("x"), py::arg("sigma"))
      .def_static(
          "sample",
          [](std::size_t n, const Array& theta_star, double sigma, std::uint64_t seed) {
            Rng rng(seed);
            const ParamVector ts = to_vec(theta_star);
            return GmmObjective(sample_gmm(n, ts.size(), ts, sigma, rng), sigma);
          },
          py::arg("n"), py::arg("theta_star"), py::arg("sigma") = 1.0, py::arg("seed") = 1)
      .def_property_readonly("sigma", &GmmObjective::sigma)
      .def_property_readonly("dim", &GmmObjective::dim)
      .def_property_readonly("x", [](const GmmObjective& o) {
        return rows(o.data().x, o.data().n, o.data().d);
      })
      .def("nll", [](const GmmObjective& o, const Array& t) { return gmm_nll(o, to_vec(t)); })
      .def("grad", [](const GmmObjective& o, const Array& t) { return from_vec(gmm_grad(o, to_vec(t))); })
      .def("hessian",
           [](const GmmObjective& o, const Array& t) { return from_sym(gmm_hessian(o, to_vec(t))); })
      .def("em_step",
           [](const GmmObjective& o, const Array& t) { return from_vec(em_step(o, to_vec(t))); });

  m.def(
      "glm_pop_loss",
      [](const Array& theta, int p, double sigma) {
        const ParamVector t = to_vec(theta);
        return glm_pop_loss(GlmPopulation{p, sigma, ParamVector(t.size())}, t);
      },
      py::arg("theta"), py::arg("p") = 2, py::arg("sigma") = 1.0);

  m.def(
      "gauss_hermite",
      [](int order) {
        const auto r = gauss_hermite(order);
        return py::make_tuple(r.nodes, r.weights);
      },
      py::arg("order") = kDefaultQuadratureOrder, "(nodes, weights) for the weight exp(-x^2)");

  m.def(
      "gmm_pop_hessian_eigs",
      [](double theta_norm, double sigma, std::size_t d, int order) {
        const auto e = gmm_pop_hessian_quadrature(theta_norm, sigma, d, gauss_hermite(order));
        return py::make_tuple(e.lambda_min, e.lambda_max);
      },
      py::arg("theta_norm"), py::arg("sigma") = 1.0, py::arg("d") = 2,
      py::arg("order") = kDefaultQuadratureOrder);

  auto step = [](const Objective& obj, const Array& theta, double eta, const std::string& backend) {
    const auto s = normgd_step(obj, to_vec(theta), eta, parse_eig_backend(backend));
    return py::make_tuple(from_vec(s.theta), s.lambda);
  };
  m.def("normgd_step", [step](const GlmObjective& o, const Array& t, double eta,
                              const std::string& b) { return step(o, t, eta, b); },
        py::arg("objective"), py::arg("theta"), py::arg("eta") = 0.5, py::arg("backend") = "auto");
  m.def("normgd_step", [step](const GmmObjective& o, const Array& t, double eta,
                              const std::string& b) { return step(o, t, eta, b); },
        py::arg("objective"), py::arg("theta"), py::arg("eta") = 0.5, py::arg("backend") = "auto");

  auto run_any = [](const Objective& obj, const Array& theta0, const std::string& algorithm,
                    double eta, std::size_t max_iter, std::optional<Array> theta_star,
                    const std::string& backend) {
    OptimizerConfig cfg;
    cfg.algorithm = parse_algorithm(algorithm);
    cfg.eta = eta;
    cfg.max_iter = max_iter;
    cfg.eig_backend = parse_eig_backend(backend);
    std::optional<ParamVector> ts;
    if (theta_star) ts = to_vec(*theta_star);
    return trace_dict(run(obj, to_vec(theta0), cfg, ts));
  };
  m.def("run", [run_any](const GlmObjective& o, const Array& t0, const std::string& a, double eta,
                         std::size_t it, std::optional<Array> ts, const std::string& b) {
          return run_any(o, t0, a, eta, it, ts, b);
        },
        py::arg("objective"), py::arg("theta0"), py::arg("algorithm") = "normgd",
        py::arg("eta") = 0.5, py::arg("max_iter") = 500, py::arg("theta_star") = py::none(),
        py::arg("backend") = "auto");
  m.def("run", [run_any](const GmmObjective& o, const Array& t0, const std::string& a, double eta,
                         std::size_t it, std::optional<Array> ts, const std::string& b) {
          return run_any(o, t0, a, eta, it, ts, b);
        },
        py::arg("objective"), py::arg("theta0"), py::arg("algorithm") = "normgd",
        py::arg("eta") = 0.5, py::arg("max_iter") = 500, py::arg("theta_star") = py::none(),
        py::arg("backend") = "auto");

  m.def(
      "slope_experiment",
      [](const std::string& model, const std::string& regime,
         std::optional<std::vector<std::size_t>> n_grid, std::size_t repeats, std::uint64_t seed,
         const std::vector<std::string>& algorithms) {
        const auto spec = make_spec(model, regime, n_grid, repeats, seed, algorithms);
        std::map<Algorithm, SlopeResult> results;
        {
          py::gil_scoped_release release;
          results = slope_experiment(spec);
        }
        py::dict out;
        for (const auto& [a, r] : results) {
          py::dict d;
          d["n_grid"] = r.n_grid;
          d["mean_errors"] = r.mean_errors;
          d["statistic"] = std::string(to_string(r.statistic));
          d["slope"] = r.fit.slope;
          d["intercept"] = r.fit.intercept;
          d["r_squared"] = r.fit.r_squared;
          d["excluded_runs"] = r.excluded_runs;
          out[py::str(std::string(to_string(a)))] = d;
        }
        return out;
      },
      py::arg("model"), py::arg("regime"), py::arg("n_grid") = py::none(), py::arg("repeats") = 10,
      py::arg("seed") = 1, py::arg("algorithms") = std::vector<std::string>{"normgd"});

  m.def(
      "run_checks",
      [](const std::vector<std::string>& only, std::uint64_t seed, std::size_t instances) {
        CheckOptions opt;
        opt.only = {only.begin(), only.end()};
        opt.seed = seed;
        opt.instances = instances;
        std::vector<CheckResult> results;
        {
          py::gil_scoped_release release;
          results = run_checks(opt);
        }
        py::list out;
        for (const auto& r : results) {
          py::dict d;
          d["suite"] = r.suite;
          d["property"] = r.property;
          d["passed"] = r.passed;
          d["detail"] = r.detail;
          out.append(d);
        }
        return out;
      },
      py::arg("only") = std::vector<std::string>{}, py::arg("seed") = 1,
      py::arg("instances") = 100);

  m.def(
      "cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = cli::run(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Run a CLI invocation in-process: (exit_code, stdout, stderr).");
}
