#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "roughmle/config.hpp"
#include "roughmle/csv.hpp"
#include "roughmle/errors.hpp"
#include "roughmle/experiment.hpp"
#include "roughmle/fgn_covariance.hpp"
#include "roughmle/fractional_operators.hpp"
#include "roughmle/mle_estimator.hpp"
#include "roughmle/path_simulation.hpp"

namespace py = pybind11;
using namespace roughmle;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) {
  return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

std::vector<double> to_vector(py::array_t<double, py::array::c_style | py::array::forcecast> a) {
  if (a.ndim() != 1) throw DomainError("expected a one-dimensional array");
  return {a.data(), a.data() + a.size()};
}

MultiscaleParams make_params(double H, double sigma, double eps, double T, double x0, int kappa,
                             double burn_in, const std::string& scheme) {
  MultiscaleParams p;
  p.H = H;
  p.sigma = sigma;
  p.epsilon = eps;
  p.T = T;
  p.x0 = x0;
  p.kappa = kappa;
  p.burn_in_multiple = burn_in;
  p.scheme = parse_scheme(scheme);
  return p;
}

py::dict row_to_dict(const ExperimentRow& r) {
  py::dict d;
  d["experiment"] = r.experiment;
  d["H"] = r.H;
  d["epsilon"] = r.epsilon;
  d["alpha"] = r.alpha;
  d["delta"] = r.delta;
  d["n"] = r.n;
  d["M"] = r.M;
  d["stat"] = r.stat;
  d["value"] = r.value;
  d["se"] = r.se;
  d["seed_base"] = r.seed_base;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Rough homogenization: fGN covariances, multiscale simulation and the sigma^2 MLE.";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<AlignmentError>(m, "AlignmentError", PyExc_ValueError);
  py::register_exception<StabilityError>(m, "StabilityError", base.ptr());
  py::register_exception<FactorizationFailure>(m, "FactorizationFailure", base.ptr());
  py::register_exception<ConvergenceFailure>(m, "ConvergenceFailure", base.ptr());
  py::register_exception<QuadratureError>(m, "QuadratureError", base.ptr());

  m.def(
      "fgn_autocovariance",
      [](std::size_t lag, double delta, double H) {
        return fgn_autocovariance(lag, delta, HurstParameter(H));
      },
      py::arg("lag"), py::arg("delta"), py::arg("H"));

  m.def(
      "inverse_spectral_norm",
      [](std::size_t n, double H) {
        return inverse_spectral_norm(build_covariance(GridSpec::unit(n), HurstParameter(H)));
      },
      py::arg("n"), py::arg("H"), "||P^{-1}||_2 for n increments on [0, 1].");

  m.def(
      "bound_ratio", [](std::size_t n, double H) { return bound_ratio(n, HurstParameter(H)); },
      py::arg("n"), py::arg("H"));

  m.def(
      "sample_fgn",
      [](std::size_t N, double delta, double H, std::uint64_t seed) {
        return to_array(sample_fgn(N, delta, HurstParameter(H), seed).values);
      },
      py::arg("N"), py::arg("delta"), py::arg("H"), py::arg("seed") = 0);

  m.def(
      "simulate",
      [](double H, double eps, double sigma, double T, double x0, std::optional<double> out_delta,
         int kappa, double burn_in, const std::string& scheme, std::uint64_t seed) {
        const auto p = make_params(H, sigma, eps, T, x0, kappa, burn_in, scheme);
        const double d = out_delta.value_or(eps);
        const auto paths = sample_multiscale(p, d, seed);
        const auto stride = static_cast<std::size_t>(std::llround(d / paths.h));
        std::vector<double> t, x, y, b;
        for (std::size_t k = 0; k < paths.slow.size(); k += stride) {
          t.push_back(paths.slow.times[k]);
          x.push_back(paths.slow.values[k]);
          y.push_back(paths.fast.values[k]);
          b.push_back(paths.driver.values[k]);
        }
        py::dict out;
        out["t"] = to_array(t);
        out["x_eps"] = to_array(x);
        out["y_eps"] = to_array(y);
        out["b_h"] = to_array(b);
        out["h"] = paths.h;
        return out;
      },
      py::arg("H"), py::arg("eps"), py::arg("sigma") = 1.0, py::arg("T") = 1.0,
      py::arg("x0") = 0.0, py::arg("out_delta") = py::none(), py::arg("kappa") = 50,
      py::arg("burn_in") = 10.0, py::arg("scheme") = "euler", py::arg("seed") = 0,
      "Multiscale paths sampled every out_delta (default eps).");

  m.def(
      "mle_sigma2",
      [](py::array_t<double, py::array::c_style | py::array::forcecast> dx, double delta,
         double H) { return mle_sigma2(to_vector(dx), delta, HurstParameter(H)).sigma2_hat; },
      py::arg("dx"), py::arg("delta"), py::arg("H"), "dx^T P^{-1} dx / N.");

  m.def(
      "estimate",
      [](double H, double eps, double alpha, double sigma, double T, int kappa, double burn_in,
         const std::string& scheme, std::uint64_t seed) {
        const auto p = make_params(H, sigma, eps, T, 0.0, kappa, burn_in, scheme);
        const auto r = estimate_from_multiscale(p, SubsampleSpec::make(alpha, eps, T), seed);
        py::dict out;
        out["sigma2_hat"] = r.sigma2_hat;
        out["N"] = r.N_used;
        out["delta"] = r.delta;
        out["epsilon"] = r.epsilon;
        out["alpha"] = r.alpha;
        return out;
      },
      py::arg("H"), py::arg("eps"), py::arg("alpha"), py::arg("sigma") = 1.0, py::arg("T") = 1.0,
      py::arg("kappa") = 50, py::arg("burn_in") = 10.0, py::arg("scheme") = "euler",
      py::arg("seed") = 0);

  m.def(
      "c_H_constant", [](double H) { return c_H_constant(HurstParameter(H)); }, py::arg("H"));

  m.def(
      "h_inner_product",
      [](std::vector<double> u, std::vector<double> v, double H) {
        return h_inner_product(StepFunction::on_unit_interval(std::move(u)),
                               StepFunction::on_unit_interval(std::move(v)), HurstParameter(H));
      },
      py::arg("u"), py::arg("v"), py::arg("H"), "u^T P v for step functions on [0, 1].");

  m.def(
      "marchaud_derivative",
      [](std::vector<double> u, double gamma, double t) {
        return marchaud_derivative(StepFunction::on_unit_interval(std::move(u)), FracOrder(gamma))(t);
      },
      py::arg("u"), py::arg("gamma"), py::arg("t"));

  m.def(
      "run_experiment",
      [](const std::string& config_text) {
        py::list rows;
        for (const auto& r : run_experiment(parse_config_text(config_text))) {
          rows.append(row_to_dict(r));
        }
        return rows;
      },
      py::arg("config_text"), "Runs a `key = value` config and returns the result rows.");

  m.def(
      "experiment_csv",
      [](const std::string& config_text) {
        std::ostringstream os;
        write_results_csv(os, run_experiment(parse_config_text(config_text)));
        return os.str();
      },
      py::arg("config_text"), "Same as run_experiment, rendered as the results CSV.");
}
