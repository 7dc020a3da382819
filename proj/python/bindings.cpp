#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "rpde/basis.hpp"
#include "rpde/error.hpp"
#include "rpde/experiments.hpp"
#include "rpde/qp.hpp"
#include "rpde/sampling.hpp"

namespace py = pybind11;
using namespace rpde;

namespace {

struct PyFit {
  std::string method;
  DensityEstimate estimate;
  CoefficientVector measurements;
  double objective = 0.0;
  std::optional<KktResiduals> kkt;
  std::optional<int> iterations;
  std::string status = "solved";
  int upsampling = kDefaultUpsampling;
};

std::vector<double> values_of(const CoefficientVector& c) { return {c.values().begin(), c.values().end()}; }

PyFit do_fit(const std::vector<double>& samples, double h, int degree, const std::string& method, int upsampling,
             double tol, int max_iters) {
  const SampleSet set(samples);
  const BasisSpec spec{degree, h};
  if (method == "pvs") {
    const auto f = fit_unconstrained(set, spec);
    const double objective =
        objective_value(make_bonafide_problem(f.measurements, spec, upsampling), f.estimate.coefficients());
    return {method, f.estimate, f.measurements, objective, std::nullopt, std::nullopt, "solved", upsampling};
  }
  if (method != "pbf") throw InvalidArgument("method must be 'pvs' or 'pbf'");
  SolverOptions options;
  options.tolerance = tol;
  options.max_iterations = max_iters;
  const auto f = fit_bonafide(set, spec, upsampling, options);
  if (f.solution.status != SolveStatus::solved || f.solution.kkt.max() > tol) {
    throw SolverFailure(to_string(f.solution.status) + " after " + std::to_string(f.solution.iterations) +
                        " iterations, max KKT residual " + std::to_string(f.solution.kkt.max()));
  }
  return {method,        f.estimate, f.problem.measurements, f.solution.objective, f.solution.kkt,
          f.solution.iterations, to_string(f.solution.status), upsampling};
}

py::dict kkt_dict(const KktResiduals& k) {
  py::dict d;
  d["primal_feasibility"] = k.primal_feasibility;
  d["dual_feasibility"] = k.dual_feasibility;
  d["complementarity"] = k.complementarity;
  d["stationarity"] = k.stationarity;
  return d;
}

}  // namespace

PYBIND11_MODULE(_rpde, m) {
  m.doc() = "Spline density estimation with a bona fide (nonnegative) projection";

  static py::exception<SolverFailure> solver_failure(m, "SolverFailure", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const SolverFailure& e) {
      py::set_error(solver_failure, e.what());
    } catch (const IoError& e) {
      py::set_error(PyExc_OSError, e.what());
    } catch (const Error& e) {
      py::set_error(PyExc_ValueError, e.what());
    }
  });

  m.def("bspline", py::vectorize([](int degree, double x) { return bspline_eval(degree, x); }),
        py::arg("degree"), py::arg("x"), "Centered B-spline of the given degree.");

  m.def(
      "correlation",
      [](int degree) {
        const auto r = correlation_sequence({degree, 1.0}, {degree, 1.0});
        return py::make_tuple(r.first(), values_of(r));
      },
      py::arg("degree"), "(first index, values) of the basis autocorrelation sampled at the integers.");

  py::class_<PyFit>(m, "Fit")
      .def_readonly("method", &PyFit::method)
      .def_property_readonly("h", [](const PyFit& f) { return f.estimate.spec().step; })
      .def_property_readonly("degree", [](const PyFit& f) { return f.estimate.spec().degree; })
      .def_property_readonly("offset", [](const PyFit& f) { return f.estimate.coefficients().first(); })
      .def_property_readonly("coefficients", [](const PyFit& f) { return values_of(f.estimate.coefficients()); })
      .def_property_readonly("measurements", [](const PyFit& f) { return values_of(f.measurements); })
      .def_property_readonly("window",
                             [](const PyFit& f) { return py::make_tuple(f.measurements.first(), f.measurements.last()); })
      .def_property_readonly("integral", [](const PyFit& f) { return f.estimate.integral(); })
      .def_property_readonly("support", [](const PyFit& f) { return f.estimate.support(); })
      .def_property_readonly("min_fine_grid", [](const PyFit& f) { return fine_grid_minimum(f.estimate, f.upsampling); })
      .def_readonly("objective", &PyFit::objective)
      .def_readonly("iterations", &PyFit::iterations)
      .def_readonly("status", &PyFit::status)
      .def_property_readonly("kkt", [](const PyFit& f) -> py::object {
        return f.kkt ? py::object(kkt_dict(*f.kkt)) : py::none();
      })
      .def(
          "__call__",
          [](const PyFit& f, py::array_t<double, py::array::c_style | py::array::forcecast> x) {
            py::array_t<double> y(std::vector<py::ssize_t>(x.shape(), x.shape() + x.ndim()));
            const double* in = x.data();
            double* out = y.mutable_data();
            for (py::ssize_t i = 0; i < x.size(); ++i) out[i] = f.estimate(in[i]);
            return y;
          },
          py::arg("x"))
      .def("__repr__", [](const PyFit& f) {
        return "<Fit " + f.method + " degree=" + std::to_string(f.estimate.spec().degree) +
               " h=" + std::to_string(f.estimate.spec().step) + ">";
      });

  m.def("fit", &do_fit, py::arg("samples"), py::arg("h"), py::arg("degree") = 3, py::arg("method") = "pbf",
        py::arg("M") = kDefaultUpsampling, py::arg("tol") = 1e-8, py::arg("max_iters") = 50000,
        "Fit the unconstrained ('pvs') or bona fide ('pbf') estimate to samples.");

  m.def(
      "sweep",
      [](std::vector<double> h_grid, int realizations, double shift_step, std::size_t samples, int degree, int M,
         std::uint64_t seed, int jobs, std::vector<std::string> methods, const std::string& density) {
        ExperimentConfig c;
        c.h_grid = std::move(h_grid);
        c.realizations = realizations;
        c.shift_step = shift_step;
        c.samples = samples;
        c.degree = degree;
        c.upsampling = M;
        c.seed = seed;
        c.jobs = jobs;
        c.methods.clear();
        for (const auto& name : methods) c.methods.push_back(parse_method(name));
        if (density == "bimodal") {
          c.density = TrueDensity::mixture({{0.5, 3.0, 1.0}, {0.5, -3.0, 1.0}});
        } else if (density != "normal") {
          throw InvalidArgument("density must be 'normal' or 'bimodal'");
        }
        ExperimentReport report;
        {
          py::gil_scoped_release release;
          report = run_sweep(c);
        }
        py::list out;
        for (const auto& p : report.points) {
          py::dict d;
          d["h"] = p.h;
          d["method"] = to_string(p.method);
          d["eta2_db"] = p.eta2_db;
          d["stderr_db"] = p.stderr_db;
          d["mean_squared_error"] = p.mean_error;
          d["raw_errors"] = p.raw_errors;
          d["n_fail"] = p.n_fail;
          d["seconds"] = p.seconds;
          out.append(d);
        }
        return out;
      },
      py::arg("h_grid"), py::arg("realizations") = 24, py::arg("shift_step") = 0.025, py::arg("samples") = 100,
      py::arg("degree") = 3, py::arg("M") = kDefaultUpsampling, py::arg("seed") = kDefaultSeed, py::arg("jobs") = 1,
      py::arg("methods") = std::vector<std::string>{"pvs", "pbf"}, py::arg("density") = "normal",
      "Shift-averaged L2 error sweep; one dict per (h, method).");

  m.def("reference_theory_db", &reference_theory_db, py::arg("h"),
        "Tabulated expected error of the unconstrained estimator (N=100, cubic, standard normal), or None.");
}
