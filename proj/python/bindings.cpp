#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "relaxkit/fitio.hpp"
#include "relaxkit/kernels.hpp"
#include "relaxkit/models.hpp"
#include "relaxkit/specfun.hpp"
#include "relaxkit/verify.hpp"

namespace py = pybind11;
using namespace relaxkit;

namespace {

using darray = py::array_t<double, py::array::c_style | py::array::forcecast>;

template <class F>
auto map(const darray& x, F f) {
  using R = decltype(f(0.0));
  py::array_t<R> out(x.request().shape);
  const double* in = x.data();
  R* o = out.mutable_data();
  const py::ssize_t n = x.size();
  {
    py::gil_scoped_release nogil;
    for (py::ssize_t i = 0; i < n; ++i) o[i] = f(in[i]);
  }
  return out;
}

std::vector<double> vec(const darray& x) { return {x.data(), x.data() + x.size()}; }

py::dict fit_dict(const FitResult& r) {
  py::dict d;
  d["model"] = to_string(r.spec.kind);
  d["spec"] = r.spec;
  d["alpha"] = r.spec.alpha;
  d["beta"] = r.spec.kind == ModelKind::KWW ? py::object(py::none()) : py::float_(r.spec.beta);
  d["tau"] = r.spec.tau;
  if (r.scale) {
    d["eps_static"] = r.scale->eps_static;
    d["eps_inf"] = r.scale->eps_inf;
  }
  d["residual_norm"] = r.residual_norm;
  d["converged"] = r.converged;
  d["iterations"] = r.iterations;
  d["aicc"] = r.score;
  d["stderr"] = r.param_stderr;
  return d;
}

FitOptions fit_options(std::optional<ModelSpec> init, int max_iterations) {
  FitOptions o;
  o.init = init;
  o.max_iterations = max_iterations;
  return o;
}

}  // namespace

PYBIND11_MODULE(_relaxkit, m) {
  m.doc() = "Dielectric relaxation models, memory kernels and fitting";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<ConvergenceFailure>(m, "ConvergenceFailure", PyExc_RuntimeError);
  py::register_exception<QuadratureFailure>(m, "QuadratureFailure", PyExc_RuntimeError);

  py::enum_<ModelKind>(m, "ModelKind")
      .value("Debye", ModelKind::Debye)
      .value("CC", ModelKind::CC)
      .value("CD", ModelKind::CD)
      .value("MCD", ModelKind::MCD)
      .value("HN", ModelKind::HN)
      .value("JWS", ModelKind::JWS)
      .value("KWW", ModelKind::KWW);

  py::class_<ModelSpec>(m, "ModelSpec")
      .def(py::init([](const std::string& model, double alpha, double beta, double tau,
                       bool strict_experimental, bool override_regime) {
             ModelSpec s;
             s.kind = parse_model_kind(model);
             s.alpha = alpha;
             s.beta = beta;
             s.tau = tau;
             s.strict_experimental = strict_experimental;
             s.override_regime = override_regime;
             s = pinned(s);
             validate(s);
             return s;
           }),
           py::arg("model"), py::arg("alpha") = 1.0, py::arg("beta") = 1.0, py::arg("tau") = 1.0,
           py::arg("strict_experimental") = false, py::arg("override_regime") = false)
      .def_readwrite("kind", &ModelSpec::kind)
      .def_readwrite("alpha", &ModelSpec::alpha)
      .def_readwrite("beta", &ModelSpec::beta)
      .def_readwrite("tau", &ModelSpec::tau)
      .def_readwrite("strict_experimental", &ModelSpec::strict_experimental)
      .def_readwrite("override_regime", &ModelSpec::override_regime)
      .def_property_readonly("model", [](const ModelSpec& s) { return to_string(s.kind); })
      .def("__repr__", [](const ModelSpec& s) {
        return "ModelSpec('" + to_string(s.kind) + "', alpha=" + std::to_string(s.alpha) +
               ", beta=" + std::to_string(s.beta) + ", tau=" + std::to_string(s.tau) + ")";
      });

  // models
  m.def("spectral", [](const ModelSpec& s, const darray& wt) {
    return map(wt, [&](double x) { return spectral(s, x); });
  }, py::arg("spec"), py::arg("omega_tau"));
  m.def("permittivity", [](const ModelSpec& s, const darray& omega, double eps0, double epsinf) {
    const PermittivityScale sc{eps0, epsinf};
    validate(sc);
    return map(omega, [&](double w) {
      const Permittivity p = permittivity(s, sc, w);
      return std::complex<double>(p.eps_re, -p.eps_im);
    });
  }, py::arg("spec"), py::arg("omega"), py::arg("eps0") = 2.0, py::arg("epsinf") = 1.0,
        "eps' - i eps''");
  m.def("response", [](const ModelSpec& s, const darray& t) {
    return map(t, [&](double x) { return response(s, x).regular; });
  }, py::arg("spec"), py::arg("t"), "regular part of phi(t)");
  m.def("relaxation", [](const ModelSpec& s, const darray& t) {
    return map(t, [&](double x) { return relaxation(s, x); });
  }, py::arg("spec"), py::arg("t"));
  m.def("pdf", [](const ModelSpec& s, const darray& xi) {
    return map(xi, [&](double x) { return pdf_g(s, x); });
  }, py::arg("spec"), py::arg("xi"));

  // special functions
  m.def("prabhakar", [](double alpha, double mu, double nu, const darray& x) {
    return map(x, [&](double v) { return prabhakar({alpha, mu, nu}, v); });
  }, py::arg("alpha"), py::arg("mu"), py::arg("nu"), py::arg("x"), "E^nu_{alpha,mu}(-x)");
  m.def("levy_density", [](double alpha, const darray& x) {
    return map(x, [&](double v) { return levy_stable_density(alpha, v); });
  }, py::arg("alpha"), py::arg("x"));
  m.def("hyper_pfq", [](const std::vector<double>& a, const std::vector<double>& b, double x) {
    return hyper_pfq(a, b, x);
  });

  // kernels
  auto kcfg = [](const ModelSpec& s, double B) {
    KernelConfig c{s, B};
    validate(c);
    return c;
  };
  m.def("memory_M_hat", [kcfg](const ModelSpec& s, const darray& z, double rate) {
    const KernelConfig c = kcfg(s, rate);
    return map(z, [&](double v) { return memory_M_hat(c, v); });
  }, py::arg("spec"), py::arg("s"), py::arg("rate") = 1.0);
  m.def("memory_k_hat", [kcfg](const ModelSpec& s, const darray& z, double rate) {
    const KernelConfig c = kcfg(s, rate);
    return map(z, [&](double v) { return memory_k_hat(c, v); });
  }, py::arg("spec"), py::arg("s"), py::arg("rate") = 1.0);
  m.def("memory_M", [kcfg](const ModelSpec& s, const darray& t, double rate) {
    const KernelConfig c = kcfg(s, rate);
    return map(t, [&](double v) { return memory_M_time(c, v).regular; });
  }, py::arg("spec"), py::arg("t"), py::arg("rate") = 1.0);
  m.def("memory_k", [kcfg](const ModelSpec& s, const darray& t, double rate) {
    const KernelConfig c = kcfg(s, rate);
    return map(t, [&](double v) { return memory_k_time(c, v).regular; });
  }, py::arg("spec"), py::arg("t"), py::arg("rate") = 1.0);

  // data and fitting
  m.def("synthesize_spectrum", [](const ModelSpec& s, const darray& omega, double eps0,
                                  double epsinf, double noise, std::uint64_t seed) {
    const SpectrumDataset d = synthesize_spectrum(s, {eps0, epsinf}, vec(omega), noise, seed);
    return py::make_tuple(py::array(py::cast(d.omega)), py::array(py::cast(d.eps_re)),
                          py::array(py::cast(d.eps_im)));
  }, py::arg("spec"), py::arg("omega"), py::arg("eps0") = 2.0, py::arg("epsinf") = 1.0,
        py::arg("noise") = 0.0, py::arg("seed") = 1);
  m.def("fit_spectrum", [](const darray& omega, const darray& eps_re, const darray& eps_im,
                           const std::string& model, std::optional<ModelSpec> init,
                           int max_iterations) {
    SpectrumDataset d;
    d.omega = vec(omega);
    d.eps_re = vec(eps_re);
    d.eps_im = vec(eps_im);
    const FitOptions opt = fit_options(init, max_iterations);
    FitResult r;
    {
      py::gil_scoped_release nogil;
      r = model == "auto" ? fit_auto(d, opt) : fit(d, parse_model_kind(model), opt);
    }
    return fit_dict(r);
  }, py::arg("omega"), py::arg("eps_re"), py::arg("eps_im"), py::arg("model") = "auto",
        py::arg("init") = py::none(), py::arg("max_iterations") = 200);
  m.def("fit_relaxation", [](const darray& t, const darray& n, const std::string& model,
                             std::optional<ModelSpec> init, int max_iterations) {
    TimeDataset d;
    d.t = vec(t);
    d.n = vec(n);
    const FitOptions opt = fit_options(init, max_iterations);
    FitResult r;
    {
      py::gil_scoped_release nogil;
      r = model == "auto" ? fit_auto(d, opt) : fit(d, parse_model_kind(model), opt);
    }
    return fit_dict(r);
  }, py::arg("t"), py::arg("n"), py::arg("model") = "auto", py::arg("init") = py::none(),
        py::arg("max_iterations") = 200);

  // verification
  m.def("verify", [](const std::string& suite, std::optional<double> tol) {
    VerifyOptions o;
    o.tolerance = tol;
    std::vector<CheckResult> res;
    {
      py::gil_scoped_release nogil;
      res = run_suite(suite, o);
    }
    py::list out;
    for (const auto& r : res) {
      py::dict d;
      d["suite"] = r.suite;
      d["name"] = r.name;
      d["max_error"] = r.max_error;
      d["tolerance"] = r.tolerance;
      d["passed"] = r.passed;
      d["detail"] = r.detail;
      out.append(d);
    }
    return out;
  }, py::arg("suite") = "all", py::arg("tol") = py::none());
  m.def("suite_names", &suite_names);
  m.def("figure_tables", [](int points) {
    py::dict out;
    for (const auto& t : figure_tables(points)) {
      py::dict cols;
      cols[py::str(t.abscissa)] = py::array(py::cast(t.x));
      for (std::size_t c = 0; c < t.columns.size(); ++c)
        cols[py::str(t.columns[c])] = py::array(py::cast(t.values[c]));
      out[py::str(t.name)] = cols;
    }
    return out;
  }, py::arg("points") = 200);
}
