#include "relaxkit/verify.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>

#include "json.hpp"
#include "relaxkit/kernels.hpp"
#include "relaxkit/laplace.hpp"
#include "relaxkit/models.hpp"
#include "relaxkit/quadrature.hpp"
#include "relaxkit/specfun.hpp"

namespace relaxkit {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

const std::vector<std::string> kSuites = {"all",           "sonine", "duality",   "pdf",
                                          "subordination", "cm",     "asymptotics", "figures",
                                          "reductions",    "transforms"};

std::vector<double> logspace(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i)
    v[i] = std::pow(10.0, std::log10(lo) + (std::log10(hi) - std::log10(lo)) * i / (n - 1));
  return v;
}

ModelSpec make(ModelKind k, double a = 1.0, double b = 1.0, double tau = 1.0) {
  ModelSpec s;
  s.kind = k;
  s.alpha = a;
  s.beta = b;
  s.tau = tau;
  return pinned(s);
}

std::string label(const ModelSpec& s) {
  std::ostringstream os;
  os << to_string(s.kind);
  switch (s.kind) {
    case ModelKind::Debye:
      break;
    case ModelKind::CC:
    case ModelKind::KWW:
      os << "(" << s.alpha << ")";
      break;
    case ModelKind::CD:
    case ModelKind::MCD:
      os << "(" << s.beta << ")";
      break;
    default:
      os << "(" << s.alpha << "," << s.beta << ")";
  }
  return os.str();
}

double rel(double a, double b) {
  const double d = std::fabs(a - b);
  return b == 0.0 ? d : d / std::fabs(b);
}

// Collects results for one suite. Each check body returns its maximum error and
// may fill a detail string; exceptions fail the check.
class Runner {
 public:
  Runner(std::string suite, const VerifyOptions& opt, std::vector<CheckResult>& out)
      : suite_(std::move(suite)), opt_(opt), out_(out) {}

  // Shape checks count violations against a zero tolerance that the global
  // override does not loosen.
  void check(const std::string& name, double tol, const std::function<double(std::string&)>& body,
             bool exact = false) {
    CheckResult r;
    r.suite = suite_;
    r.name = name;
    r.tolerance = tol;
    if (!exact && opt_.tolerance) r.tolerance = *opt_.tolerance;
    if (auto it = opt_.overrides.find(suite_ + "/" + name); it != opt_.overrides.end())
      r.tolerance = it->second;
    try {
      r.max_error = body(r.detail);
      r.passed = std::isfinite(r.max_error) && r.max_error <= r.tolerance;
    } catch (const std::exception& e) {
      r.max_error = kInf;
      r.passed = false;
      r.detail = e.what();
    }
    out_.push_back(std::move(r));
  }

 private:
  std::string suite_;
  const VerifyOptions& opt_;
  std::vector<CheckResult>& out_;
};

// Keeps the worst error and where it happened.
struct Worst {
  double err = 0.0;
  std::string where;
  void see(double e, const std::string& at) {
    if (!(e <= err)) {
      err = e;
      where = at;
    }
  }
  double done(std::string& detail) const {
    if (!where.empty()) detail = "worst at " + where;
    return err;
  }
};

std::string at(const ModelSpec& s, const char* var, double v) {
  std::ostringstream os;
  os << label(s) << " " << var << "=" << v;
  return os.str();
}

// Kernel-bearing samples used by several suites.
std::vector<ModelSpec> kernel_models() {
  return {make(ModelKind::Debye),         make(ModelKind::CC, 0.6),
          make(ModelKind::CD, 1.0, 0.4),  make(ModelKind::MCD, 1.0, 0.4),
          make(ModelKind::HN, 0.6, 0.4),  make(ModelKind::JWS, 0.6, 0.4)};
}

double density(const ModelSpec& s, double xi, PdfForm form = PdfForm::Auto, bool reduce = true) {
  PdfOptions o;
  o.form = form;
  o.use_reductions = reduce;
  return pdf_g(s, xi, o);
}

// ---------------------------------------------------------------- reductions

void suite_reductions(Runner& run) {
  const std::vector<ModelSpec> debyes = {
      make(ModelKind::Debye, 1, 1, 2.0), make(ModelKind::CC, 1, 1, 2.0),
      make(ModelKind::CD, 1, 1, 2.0),    make(ModelKind::MCD, 1, 1, 2.0),
      make(ModelKind::HN, 1, 1, 2.0),    make(ModelKind::JWS, 1, 1, 2.0)};
  run.check("debye_spectral", 1e-12, [&](std::string& d) {
    Worst w;
    for (const auto& s : debyes)
      for (double wt : logspace(1e-3, 1e3, 61)) {
        const std::complex<double> ref = 1.0 / std::complex<double>(1.0, wt);
        w.see(std::abs(spectral(s, wt) - ref) / std::abs(ref), at(s, "wt", wt));
      }
    return w.done(d);
  });
  auto time_models = debyes;
  time_models.push_back(make(ModelKind::KWW, 1, 1, 2.0));
  run.check("debye_response", 1e-12, [&](std::string& d) {
    Worst w;
    for (const auto& s : time_models)
      for (double x : logspace(1e-2, 1e2, 61)) {
        const TimeResponse r = response(s, x * s.tau);
        w.see(rel(r.regular, std::exp(-x) / s.tau) + std::fabs(r.singular_weight), at(s, "t", x));
      }
    return w.done(d);
  });
  run.check("debye_relaxation", 1e-12, [&](std::string& d) {
    Worst w;
    for (const auto& s : time_models)
      for (double x : logspace(1e-2, 1e2, 61))
        w.see(rel(relaxation(s, x * s.tau), std::exp(-x)), at(s, "t", x));
    return w.done(d);
  });
  // The general HN and JWS formulas at parameter points where closed forms
  // exist, absolute differences.
  run.check("general_formulas_at_reduction_points", 1e-10, [&](std::string& d) {
    Worst w;
    EvalOptions general;
    general.use_reductions = false;
    for (ModelKind k : {ModelKind::HN, ModelKind::JWS})
      for (auto [a, b] : {std::pair{0.6, 1.0}, {1.0, 0.4}, {1.0, 1.0}}) {
        const ModelSpec s = make(k, a, b);
        for (double t : logspace(0.1, 10.0, 21)) {
          w.see(std::fabs(relaxation(s, t, general) - relaxation(s, t)), at(s, "t", t));
          w.see(std::fabs(response(s, t, general).regular - response(s, t).regular),
                at(s, "t", t));
        }
      }
    return w.done(d);
  });
}

// -------------------------------------------------------------------- sonine

void suite_sonine(Runner& run) {
  run.check("identity", 1e-14, [&](std::string& d) {
    Worst w;
    for (const auto& s : kernel_models())
      for (double B : {1.0, 2.5})
        for (double x : logspace(1e-3, 1e3, 61)) {
          const KernelConfig c{s, B};
          w.see(std::fabs(x * memory_M_hat(c, x) * memory_k_hat(c, x) - 1.0), at(s, "s", x));
        }
    return w.done(d);
  });
  run.check("rate_invariance", 1e-14, [&](std::string& d) {
    Worst w;
    for (const auto& s : kernel_models())
      for (double B : {0.5, 3.0})
        for (double x : logspace(1e-2, 1e2, 21)) {
          const KernelConfig c1{s, 1.0}, cb{s, B};
          w.see(rel(B * memory_M_hat(cb, x), memory_M_hat(c1, x)), at(s, "s", x));
          w.see(rel(memory_k_hat(cb, x) / B, memory_k_hat(c1, x)), at(s, "s", x));
        }
    return w.done(d);
  });
  // k(t) for CC is a pure power, M(t) as well.
  run.check("cc_kernels_closed_form", 1e-12, [&](std::string& d) {
    Worst w;
    for (double a : {0.3, 0.6, 0.9})
      for (double tau : {0.5, 2.0}) {
        const ModelSpec s = make(ModelKind::CC, a, 1.0, tau);
        const double B = 1.7;
        const KernelConfig c{s, B};
        for (double t : logspace(1e-2, 1e2, 21)) {
          const double k = B * std::pow(tau, a) * std::pow(t, -a) / std::tgamma(1.0 - a);
          const double M = std::pow(t, a - 1.0) / (B * std::pow(tau, a) * std::tgamma(a));
          w.see(rel(memory_k_time(c, t).regular, k), at(s, "t", t));
          w.see(rel(memory_M_time(c, t).regular, M), at(s, "t", t));
        }
      }
    return w.done(d);
  });
  // Forward transforms of the time-domain kernels against the images.
  run.check("time_kernels_transform", 1e-4, [&](std::string& d) {
    Worst w;
    const std::vector<std::pair<ModelSpec, std::pair<double, double>>> cases = {
        {make(ModelKind::HN, 0.5, 0.5), {-0.5, -0.5}},
        {make(ModelKind::JWS, 0.5, 0.5), {-0.75, -0.25}},
        {make(ModelKind::CC, 0.6), {-0.4, -0.6}}};
    for (const auto& [s, tails] : cases) {
      const KernelConfig c{s, 1.0};
      for (double z : {0.5, 1.0, 2.0}) {
        const double M = forward_laplace(
            [&](double t) { return memory_M_time(c, t).regular; }, z, tails.first, 1e-8);
        w.see(rel(M + memory_M_time(c, 1.0).singular_weight, memory_M_hat(c, z)),
              at(s, "M z", z));
        const double k = forward_laplace(
            [&](double t) { return memory_k_time(c, t).regular; }, z, tails.second, 1e-8);
        w.see(rel(k + memory_k_time(c, 1.0).singular_weight, memory_k_hat(c, z)),
              at(s, "k z", z));
      }
    }
    return w.done(d);
  });
  run.check("evolution_residual", 1e-4, [&](std::string& d) {
    Worst w;
    const auto grid = logspace(0.1, 5.0, 9);
    auto samples = kernel_models();
    samples.push_back(make(ModelKind::HN, 0.5, 0.5));
    samples.push_back(make(ModelKind::JWS, 0.5, 0.5));
    for (const auto& s : samples)
      for (double B : {1.0, 3.0}) {
        const KernelConfig c{s, B};
        w.see(evolution_residual(c, grid), label(s) + " B=" + std::to_string(B));
      }
    return w.done(d);
  });
  run.check("caputo_rl_relation", 1e-4, [&](std::string& d) {
    Worst w;
    for (const auto& s : {make(ModelKind::HN, 0.5, 0.5), make(ModelKind::HN, 0.75, 1.0 / 3),
                          make(ModelKind::CC, 0.6), make(ModelKind::CD, 1.0, 0.4)})
      for (double t : {0.2, 0.5, 1.0, 2.0, 5.0}) {
        const OperatorPair p = operator_relation(s, t);
        w.see(std::fabs(p.caputo - p.riemann_liouville), at(s, "t", t));
      }
    return w.done(d);
  });
}

// ------------------------------------------------------------------- duality

const std::vector<std::pair<double, double>> kDualityPairs = {{0.3, 0.5}, {0.5, 0.5}, {0.75, 1.0 / 3}};

void suite_duality(Runner& run) {
  run.check("spectral_sum", 1e-12, [&](std::string& d) {
    Worst w;
    for (auto [a, b] : kDualityPairs) {
      const ModelSpec s = make(ModelKind::JWS, a, b);
      for (double wt : logspace(1e-3, 1e3, 30)) {
        const std::complex<double> iw(0.0, wt);
        const std::complex<double> mirror = std::pow(1.0 + std::pow(iw, -a), -b);
        w.see(std::abs(spectral(s, wt) + mirror - 1.0), at(s, "wt", wt));
      }
    }
    return w.done(d);
  });
  // n_JWS(t) = 1 + int_0^t u^-1 E^beta_{alpha,0}(-(u/tau)^alpha) du.
  run.check("relaxation_integral", 1e-6, [&](std::string& d) {
    Worst w;
    for (auto [a, b] : kDualityPairs)
      for (double tau : {1.0, 2.0}) {
        const ModelSpec s = make(ModelKind::JWS, a, b, tau);
        for (double t : {0.2, 1.0, 5.0}) {
          auto f = [&](double u) {
            return u > 0.0 ? prabhakar({a, 0.0, b}, std::pow(u / tau, a)) / u : 0.0;
          };
          const double I = integrate_finite(f, 0.0, t, 1e-12);
          w.see(std::fabs(relaxation(s, t) - (1.0 + I)), at(s, "t", t));
        }
      }
    return w.done(d);
  });
  // n_JWS(t) + L^-1[(1 - (1 + (s tau)^-alpha)^-beta) / s](t) = 1.
  run.check("relaxation_sum", 1e-6, [&](std::string& d) {
    Worst w;
    for (auto [a, b] : kDualityPairs) {
      const ModelSpec s = make(ModelKind::JWS, a, b);
      auto F = [&](cplx z) { return (1.0 - std::pow(1.0 + std::pow(z, -a), -b)) / z; };
      for (double t : {0.2, 1.0, 5.0})
        w.see(std::fabs(relaxation(s, t) + talbot_invert(F, t, 48) - 1.0), at(s, "t", t));
    }
    return w.done(d);
  });
}

// ----------------------------------------------------------------------- pdf

std::vector<ModelSpec> valid_density_samples() {
  std::vector<ModelSpec> v;
  for (auto [a, b] : {std::pair{0.3, 0.5}, {0.5, 0.5}, {0.5, 2.0}, {0.75, 1.0 / 3},
                      {0.75, 4.0 / 3}, {0.9, 1.1}}) {
    v.push_back(make(ModelKind::HN, a, b));
    v.push_back(make(ModelKind::JWS, a, b));
  }
  v.push_back(make(ModelKind::CC, 0.7));
  v.push_back(make(ModelKind::CD, 1.0, 0.4));
  v.push_back(make(ModelKind::MCD, 1.0, 0.4));
  return v;
}

double cc_density(double a, double xi) {
  const double xa = std::pow(xi, a);
  return std::pow(xi, a - 1.0) * std::sin(a * kPi) /
         (kPi * (xa * xa + 2.0 * xa * std::cos(a * kPi) + 1.0));
}

std::vector<ModelSpec> mixture_samples() {
  return {make(ModelKind::HN, 0.5, 0.5), make(ModelKind::JWS, 0.5, 0.5), make(ModelKind::CC, 0.7),
          make(ModelKind::CD, 1.0, 0.4), make(ModelKind::MCD, 1.0, 0.4)};
}

void suite_pdf(Runner& run) {
  run.check("nonnegative", 0.0, [&](std::string& d) {
    Worst w;
    for (const auto& s : valid_density_samples())
      for (double xi : logspace(1e-6, 1e6, 241)) w.see(std::max(0.0, -density(s, xi)), at(s, "xi", xi));
    return w.done(d);
  }, true);
  run.check("normalization", 1e-6, [&](std::string& d) {
    Worst w;
    auto samples = mixture_samples();
    samples.push_back(make(ModelKind::HN, 0.75, 1.0 / 3));
    samples.push_back(make(ModelKind::JWS, 0.75, 1.0 / 3));
    for (const auto& s : samples)
      w.see(std::fabs(integrate_half_line([&](double xi) { return density(s, xi); }, 1.0, 1e-12) - 1.0),
            label(s));
    return w.done(d);
  });
  run.check("support", 0.0, [&](std::string& d) {
    Worst w;
    const auto grid = logspace(1e-4, 1e4, 161);
    for (double b : {0.2, 0.4, 0.8}) {
      const ModelSpec cd = make(ModelKind::CD, 1.0, b), mcd = make(ModelKind::MCD, 1.0, b);
      int bad = 0;
      for (double xi : grid) {
        const double g1 = density(cd, xi), g2 = density(mcd, xi);
        bad += (xi <= 1.0) ? (g1 != 0.0) : !(g1 > 0.0);
        bad += (xi >= 1.0) ? (g2 != 0.0) : !(g2 > 0.0);
      }
      w.see(bad, "beta=" + std::to_string(b));
    }
    return w.done(d);
  }, true);
  run.check("hn_beta1_is_cc", 1e-12, [&](std::string& d) {
    Worst w;
    for (double a : {0.3, 0.5, 0.7, 0.9})
      for (ModelKind k : {ModelKind::HN, ModelKind::JWS}) {
        const ModelSpec s = make(k, a, 1.0);
        for (double xi : logspace(1e-4, 1e4, 81))
          w.see(rel(density(s, xi, PdfForm::Trigonometric, false), cc_density(a, xi)), at(s, "xi", xi));
      }
    return w.done(d);
  });
  run.check("trigonometric_vs_hypergeometric", 1e-9, [&](std::string& d) {
    Worst w;
    for (double a : {1.0 / 3, 0.5, 2.0 / 3, 0.75})
      for (double b : {1.0 / 3, 0.5, 0.9}) {
        const ModelSpec hn = make(ModelKind::HN, a, b), jws = make(ModelKind::JWS, a, b);
        for (double xi : logspace(2.0, 1e3, 20))
          w.see(rel(density(hn, xi, PdfForm::Hypergeometric), density(hn, xi)), at(hn, "xi", xi));
        for (double xi : logspace(1e-3, 0.5, 20))
          w.see(rel(density(jws, xi, PdfForm::Hypergeometric), density(jws, xi)), at(jws, "xi", xi));
      }
    return w.done(d);
  });
  run.check("trigonometric_vs_series", 1e-9, [&](std::string& d) {
    Worst w;
    for (auto [a, b] : {std::pair{0.4, 0.5}, {0.75, 1.0 / 3}, {0.9, 0.7}}) {
      const ModelSpec hn = make(ModelKind::HN, a, b), jws = make(ModelKind::JWS, a, b);
      for (double xi : logspace(2.0, 1e3, 20))
        w.see(rel(density(hn, xi, PdfForm::Series), density(hn, xi)), at(hn, "xi", xi));
      for (double xi : logspace(1e-3, 0.5, 20))
        w.see(rel(density(jws, xi, PdfForm::Series), density(jws, xi)), at(jws, "xi", xi));
    }
    return w.done(d);
  });
  // The sign-flipped arctan form coincides with the continuous angle when the
  // flip is a shift by pi, i.e. for beta = 1.
  run.check("split_sign_beta1", 1e-12, [&](std::string& d) {
    Worst w;
    for (double a : {0.6, 0.8, 0.95})
      for (ModelKind k : {ModelKind::HN, ModelKind::JWS}) {
        const ModelSpec s = make(k, a, 1.0);
        for (double xi : logspace(1e-3, 1e3, 61))
          w.see(rel(density(s, xi, PdfForm::SplitSign), cc_density(a, xi)), at(s, "xi", xi));
      }
    return w.done(d);
  });
  run.check("negative_lobe_beyond_regime", 0.0, [&](std::string& d) {
    ModelSpec s = make(ModelKind::HN, 0.75, 7.0 / 3);
    s.override_regime = true;
    double lo = kInf;
    for (double xi : logspace(1e-3, 1e3, 241)) lo = std::min(lo, density(s, xi));
    d = "min g = " + std::to_string(lo);
    return lo < 0.0 ? 0.0 : 1.0;
  }, true);
  run.check("mixture", 1e-5, [&](std::string& d) {
    Worst w;
    for (const auto& s : mixture_samples())
      for (double x : {0.1, 1.0, 10.0}) {
        const double m = integrate_half_line(
            [&](double xi) { return std::exp(-x * xi) * density(s, xi); }, 1.0, 1e-12);
        w.see(std::fabs(m - relaxation(s, x * s.tau)), at(s, "t", x));
      }
    return w.done(d);
  });
}

// ------------------------------------------------------------- subordination

void suite_subordination(Runner& run) {
  auto parents = [&](const std::string& name, ModelSpec s) {
    run.check(name, 1e-5, [s](std::string& d) {
      Worst w;
      const KernelConfig c{s, 1.0};
      for (double t : {0.2, 1.0, 5.0}) {
        const double direct = relaxation(s, t);
        const double debye = subordinated_relaxation(c, Parent::DebyeParent, t);
        const double stable = subordinated_relaxation(c, Parent::StableParent, t);
        w.see(std::max({std::fabs(direct - debye), std::fabs(direct - stable),
                        std::fabs(debye - stable)}),
              at(s, "t", t));
      }
      return w.done(d);
    });
  };
  parents("hn_parents", make(ModelKind::HN, 0.5, 0.5));
  parents("jws_parents", make(ModelKind::JWS, 0.5, 0.5));
  parents("cc_parents", make(ModelKind::CC, 0.5));
  run.check("kernel_normalization", 1e-6, [&](std::string& d) {
    Worst w;
    for (double a : {0.3, 0.5, 0.8})
      for (double t : {0.1, 1.0, 10.0}) {
        const double m = integrate_half_line(
            [&](double u) { return u > 0.0 ? subordination_kernel(a, u, t) : 0.0; },
            std::pow(t, a), 1e-12);
        w.see(std::fabs(m - 1.0), "alpha=" + std::to_string(a) + " t=" + std::to_string(t));
      }
    return w.done(d);
  });
  run.check("levy_normalization", 1e-6, [&](std::string& d) {
    Worst w;
    for (double a : {0.3, 0.5, 0.8})
      w.see(std::fabs(integrate_half_line([&](double x) { return levy_stable_density(a, x); }, 1.0,
                                          1e-12) - 1.0),
            "alpha=" + std::to_string(a));
    return w.done(d);
  });
  run.check("levy_laplace", 1e-7, [&](std::string& d) {
    Worst w;
    for (double a : {0.3, 0.5, 0.8})
      for (double z : {0.5, 1.0, 2.0}) {
        const double v = forward_laplace([&](double x) { return levy_stable_density(a, x); }, z,
                                         -1.0 - a);
        w.see(std::fabs(v - std::exp(-std::pow(z, a))),
              "alpha=" + std::to_string(a) + " z=" + std::to_string(z));
      }
    return w.done(d);
  });
  run.check("levy_half_closed_form", 1e-9, [&](std::string& d) {
    Worst w;
    for (double x : logspace(1e-2, 1e4, 61)) {
      const double ref = std::exp(-0.25 / x) / (2.0 * std::sqrt(kPi) * std::pow(x, 1.5));
      w.see(rel(levy_stable_density(0.5, x), ref), "x=" + std::to_string(x));
    }
    return w.done(d);
  });
  // E_{1/2}(-x) = int_0^inf exp(-x r) M(r) dr with M(r) = 2 r^-3 Phi_{1/2}(r^-2),
  // against exp(x^2) erfc(x).
  run.check("mittag_leffler_integral", 1e-5, [&](std::string& d) {
    Worst w;
    for (double x : {0.5, 1.0, 2.0}) {
      auto f = [&](double r) {
        const double y = 1.0 / (r * r);
        if (!(y > 0.0) || !std::isfinite(y)) return 0.0;
        return 2.0 * std::exp(-x * r) * levy_stable_density(0.5, y) / (r * r * r);
      };
      const double v = integrate_half_line(f, 1.0, 1e-12);
      w.see(std::fabs(v - std::exp(x * x) * std::erfc(x)), "x=" + std::to_string(x));
    }
    return w.done(d);
  });
}

// ------------------------------------------------------------------------ cm

std::vector<ModelSpec> cm_samples() {
  std::vector<ModelSpec> v;
  for (auto [a, b] : {std::pair{0.5, 0.5}, {0.75, 1.0 / 3}, {0.5, 2.0}, {0.3, 3.0}, {0.9, 1.0}}) {
    v.push_back(make(ModelKind::HN, a, b));
    v.push_back(make(ModelKind::JWS, a, b));
  }
  v.push_back(make(ModelKind::Debye));
  v.push_back(make(ModelKind::CC, 0.7));
  v.push_back(make(ModelKind::CD, 1.0, 0.4));
  v.push_back(make(ModelKind::MCD, 1.0, 0.4));
  v.push_back(make(ModelKind::KWW, 0.6));
  return v;
}

void suite_cm(Runner& run) {
  run.check("sign_pattern", 0.0, [&](std::string& d) {
    Worst w;
    for (const auto& s : cm_samples())
      for (double t : logspace(1e-3, 1e3, 50)) {
        const double n = relaxation(s, t), d1 = relaxation_derivative(s, t, 1),
                     d2 = relaxation_derivative(s, t, 2);
        w.see(std::max({-n, d1, -d2, 0.0}), at(s, "t", t));
      }
    return w.done(d);
  }, true);
  // Derivatives against central differences.
  run.check("derivatives", 1e-6, [&](std::string& d) {
    Worst w;
    for (const auto& s : cm_samples())
      for (double t : logspace(0.1, 10.0, 9)) {
        const double h = 1e-4 * t;
        const double fd1 = (relaxation(s, t + h) - relaxation(s, t - h)) / (2.0 * h);
        const double fd2 = (relaxation_derivative(s, t + h, 1) - relaxation_derivative(s, t - h, 1)) /
                           (2.0 * h);
        w.see(rel(relaxation_derivative(s, t, 1), fd1), at(s, "t", t));
        w.see(rel(relaxation_derivative(s, t, 2), fd2), at(s, "t", t));
      }
    return w.done(d);
  });
}

// --------------------------------------------------------------- asymptotics

void suite_asymptotics(Runner& run) {
  const std::vector<ModelSpec> samples = {make(ModelKind::HN, 0.75, 1.0 / 3), make(ModelKind::HN, 0.6, 0.8),
                                          make(ModelKind::JWS, 0.75, 1.0 / 3), make(ModelKind::JWS, 0.6, 0.8)};
  run.check("short_time", 0.01, [&](std::string& d) {
    Worst w;
    const double t = 1e-4;
    for (const auto& s : samples) {
      const double phi = asymptotic(s, Quantity::Response, Regime::Short, t).value;
      w.see(std::fabs(response(s, t).regular / phi - 1.0), at(s, "phi t", t));
      // 1 - n carries the information at short times.
      const double lead = 1.0 - asymptotic(s, Quantity::Relaxation, Regime::Short, t).value;
      w.see(std::fabs((1.0 - relaxation(s, t)) / lead - 1.0), at(s, "n t", t));
    }
    return w.done(d);
  });
  run.check("long_time", 0.02, [&](std::string& d) {
    Worst w;
    const double t = 1e4;
    for (const auto& s : samples) {
      w.see(std::fabs(response(s, t).regular / asymptotic(s, Quantity::Response, Regime::Long, t).value - 1.0),
            at(s, "phi t", t));
      w.see(std::fabs(relaxation(s, t) / asymptotic(s, Quantity::Relaxation, Regime::Long, t).value - 1.0),
            at(s, "n t", t));
    }
    return w.done(d);
  });
}

// ---------------------------------------------------------------- transforms

double tail_exponent(const ModelSpec& s) {
  switch (s.kind) {
    case ModelKind::CC:
    case ModelKind::HN:
      return -1.0 - s.alpha;
    case ModelKind::JWS:
      return -1.0 - s.alpha * s.beta;
    case ModelKind::MCD:
      return -1.0 - s.beta;
    default:
      return 0.0;
  }
}

void suite_transforms(Runner& run) {
  run.check("prabhakar_representations", 1e-8, [&](std::string& d) {
    Worst w;
    EvalStrategy ps, ct, hg;
    ps.kind = StrategyKind::PowerSeries;
    ct.kind = StrategyKind::ContourInversion;
    hg.kind = StrategyKind::HypergeometricReduction;
    for (double a : {1.0 / 3, 0.5, 2.0 / 3, 0.75})
      for (auto [mu, nu] : {std::pair{1.0, 0.5}, {0.5 * a, 0.5}, {1.0, 1.0}, {0.0, 0.5}})
        for (double t : logspace(1e-2, 5.0, 40)) {
          const PrabhakarParams p{a, mu, nu};
          const double x = std::pow(t, a);
          const double s = prabhakar(p, x, ps);
          std::ostringstream os;
          os << "alpha=" << a << " mu=" << mu << " nu=" << nu << " x=" << x;
          w.see(std::max(rel(prabhakar(p, x, ct), s), rel(prabhakar(p, x, hg), s)), os.str());
        }
    return w.done(d);
  });
  // int_0^inf e^{-zt} phi(t) dt with the closed-form phi.
  run.check("forward_transform", 1e-5, [&](std::string& d) {
    Worst w;
    for (const auto& s : kernel_models())
      for (double z : {0.5, 1.0, 2.0, 5.0}) {
        const double v = forward_laplace([&](double t) { return response(s, t).regular; }, z,
                                         tail_exponent(s)) +
                         response(s, 1.0).singular_weight;
        w.see(rel(v, std::real(spectral_image(s, z))), at(s, "z", z));
      }
    return w.done(d);
  });
  run.check("round_trip", 1e-5, [&](std::string& d) {
    Worst w;
    for (const auto& s : kernel_models()) {
      const LaplaceImage img = response_image(s);
      for (double z : {0.5, 1.0, 2.0, 5.0}) {
        const double v =
            forward_laplace([&](double t) { return inverse_laplace(img, t).value; }, z,
                            tail_exponent(s), 1e-8) +
            img.singular_weight;
        w.see(rel(v, std::real(img.evaluator(z)) + img.singular_weight), at(s, "z", z));
      }
    }
    return w.done(d);
  });
  run.check("talbot_vs_stehfest", 1e-6, [&](std::string& d) {
    Worst w;
    std::vector<ModelSpec> smooth = {make(ModelKind::Debye), make(ModelKind::CD, 1.0, 0.5),
                                     make(ModelKind::CD, 1.0, 0.8), make(ModelKind::MCD, 1.0, 0.5)};
    for (const auto& s : smooth) {
      const LaplaceImage img = response_image(s);
      for (double t : {0.5, 1.0, 2.0}) {
        InversionConfig cfg;
        const InversionResult r = inverse_laplace(img, t, cfg);
        InversionConfig gs;
        gs.method = InversionMethod::GaverStehfest;
        gs.nodes = default_stehfest_order(img);
        w.see(rel(inverse_laplace(img, t, gs).value, r.value), at(s, "t", t));
      }
    }
    return w.done(d);
  });
}

// ------------------------------------------------------------------- figures

ModelSpec override_spec(ModelKind k, double a, double b) {
  ModelSpec s = make(k, a, b);
  s.override_regime = b > 1.0 / a;
  return s;
}

FigureTable time_table(const std::string& name, ModelKind k, bool response_q,
                       const std::vector<double>& betas, int points) {
  FigureTable t;
  t.name = name;
  t.abscissa = "t";
  t.x = logspace(1e-3, 1e2, points);
  for (double b : betas) {
    const ModelSpec s = override_spec(k, 0.5, b);
    std::ostringstream os;
    os << (response_q ? "phi" : "n") << "_beta_" << b;
    t.columns.push_back(os.str());
    std::vector<double> col;
    for (double x : t.x) col.push_back(response_q ? response(s, x).regular : relaxation(s, x));
    t.values.push_back(std::move(col));
  }
  return t;
}

FigureTable density_table(const std::string& name, ModelKind k,
                          const std::vector<std::pair<double, double>>& params, int points) {
  FigureTable t;
  t.name = name;
  t.abscissa = "xi";
  t.x = logspace(1e-3, 1e3, points);
  for (auto [a, b] : params) {
    const ModelSpec s = override_spec(k, a, b);
    std::ostringstream os;
    os << "g_alpha_" << a << "_beta_" << b;
    t.columns.push_back(os.str());
    std::vector<double> col;
    for (double x : t.x) col.push_back(density(s, x));
    t.values.push_back(std::move(col));
  }
  return t;
}

int count_non_decreasing(const std::vector<double>& v) {
  int n = 0;
  for (std::size_t i = 1; i < v.size(); ++i) n += !(v[i] < v[i - 1]);
  return n;
}

void suite_figures(Runner& run) {
  const auto tables = figure_tables(200);
  auto find = [&](const std::string& n) -> const FigureTable& {
    return *std::find_if(tables.begin(), tables.end(), [&](const FigureTable& t) { return t.name == n; });
  };
  run.check("fig1_beta3_interior_maximum", 0.0, [&](std::string& d) {
    const auto& v = find("fig1").values[3];
    const auto i = std::max_element(v.begin(), v.end()) - v.begin();
    d = "argmax t = " + std::to_string(find("fig1").x[i]);
    return (i > 0 && i + 1 < static_cast<long>(v.size())) ? 0.0 : 1.0;
  }, true);
  auto decreasing = [&](const std::string& check, const std::string& fig, int columns) {
    run.check(check, 0.0, [&, fig, columns](std::string& d) {
      int bad = 0;
      for (int c = 0; c < columns; ++c) bad += count_non_decreasing(find(fig).values[c]);
      d = std::to_string(bad) + " non-decreasing steps";
      return static_cast<double>(bad);
    }, true);
  };
  decreasing("fig1_decreasing_beta_le_2", "fig1", 3);
  decreasing("fig2_decreasing", "fig2", 3);
  decreasing("fig3_decreasing_beta_le_2", "fig3", 3);
  decreasing("fig6_decreasing", "fig6", 3);
  auto lobes = [&](const std::string& check, const std::string& fig, std::vector<bool> negative) {
    run.check(check, 0.0, [&, fig, negative](std::string& d) {
      int bad = 0;
      const auto& t = find(fig);
      for (std::size_t c = 0; c < negative.size(); ++c) {
        const double lo = *std::min_element(t.values[c].begin(), t.values[c].end());
        bad += negative[c] != (lo < 0.0);
        d += t.columns[c] + " min=" + std::to_string(lo) + "; ";
      }
      return static_cast<double>(bad);
    }, true);
  };
  lobes("fig5a_negative_part_only_beyond_regime", "fig5a", {false, false, true});
  lobes("fig5b_nonnegative", "fig5b", {false, false, false});
  lobes("fig4a_negative_part_only_beyond_regime", "fig4a", {false, false, true});
  lobes("fig4b_nonnegative", "fig4b", {false, false, false});
}

}  // namespace

const std::vector<std::string>& suite_names() { return kSuites; }

bool is_suite(const std::string& name) {
  return std::find(kSuites.begin(), kSuites.end(), name) != kSuites.end();
}

std::vector<FigureTable> figure_tables(int points) {
  if (points < 2) throw DomainError("figure tables need at least two points");
  const std::vector<std::pair<double, double>> fam_a = {{0.75, 1.0 / 3}, {0.75, 4.0 / 3}, {0.75, 7.0 / 3}};
  const std::vector<std::pair<double, double>> fam_b = {{0.25, 1.0 / 3}, {0.5, 1.0 / 3}, {0.75, 1.0 / 3}};
  return {time_table("fig1", ModelKind::HN, true, {0.5, 1.0, 2.0, 3.0}, points),
          time_table("fig2", ModelKind::HN, false, {0.5, 1.0, 2.0}, points),
          time_table("fig3", ModelKind::JWS, true, {0.5, 1.0, 2.0, 3.0}, points),
          density_table("fig4a", ModelKind::JWS, fam_a, points),
          density_table("fig4b", ModelKind::JWS, fam_b, points),
          density_table("fig5a", ModelKind::HN, fam_a, points),
          density_table("fig5b", ModelKind::HN, fam_b, points),
          time_table("fig6", ModelKind::JWS, false, {0.5, 1.0, 2.0}, points)};
}

std::string to_csv(const FigureTable& t) {
  std::ostringstream os;
  os.precision(17);
  os << t.abscissa;
  for (const auto& c : t.columns) os << ',' << c;
  os << '\n';
  for (std::size_t i = 0; i < t.x.size(); ++i) {
    os << t.x[i];
    for (const auto& col : t.values) os << ',' << col[i];
    os << '\n';
  }
  return os.str();
}

std::vector<CheckResult> run_suite(const std::string& suite, const VerifyOptions& opt) {
  if (!is_suite(suite)) throw DomainError("unknown verify suite: " + suite);
  using Fn = void (*)(Runner&);
  const std::vector<std::pair<std::string, Fn>> table = {
      {"reductions", suite_reductions}, {"sonine", suite_sonine},
      {"duality", suite_duality},       {"pdf", suite_pdf},
      {"subordination", suite_subordination}, {"cm", suite_cm},
      {"asymptotics", suite_asymptotics},     {"transforms", suite_transforms},
      {"figures", suite_figures}};
  std::vector<CheckResult> out;
  for (const auto& [name, fn] : table) {
    if (suite != "all" && suite != name) continue;
    Runner r(name, opt, out);
    fn(r);
  }
  return out;
}

bool all_passed(const std::vector<CheckResult>& results) {
  return std::all_of(results.begin(), results.end(), [](const CheckResult& r) { return r.passed; });
}

std::string report_json(const std::vector<CheckResult>& results, int indent) {
  nlohmann::ordered_json checks = nlohmann::ordered_json::array();
  int failed = 0;
  for (const auto& r : results) {
    nlohmann::ordered_json j;
    j["suite"] = r.suite;
    j["name"] = r.name;
    if (std::isfinite(r.max_error))
      j["max_error"] = r.max_error;
    else
      j["max_error"] = nullptr;
    j["tolerance"] = r.tolerance;
    j["passed"] = r.passed;
    j["detail"] = r.detail;
    checks.push_back(std::move(j));
    failed += !r.passed;
  }
  nlohmann::ordered_json doc;
  doc["passed"] = failed == 0;
  doc["checks_run"] = results.size();
  doc["checks_failed"] = failed;
  doc["checks"] = std::move(checks);
  return doc.dump(indent);
}

}  // namespace relaxkit
