#include "relaxkit/kernels.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>

#include "cmath_ext.hpp"
#include "relaxkit/parallel.hpp"
#include "relaxkit/quadrature.hpp"

namespace relaxkit {

namespace {

using detail::cexpm1;
using detail::clog1p;
using detail::cpow;

bool jws_family(ModelKind k) { return k == ModelKind::JWS || k == ModelKind::MCD; }

double E(double a, double mu, double nu, double x) {
  return prabhakar(PrabhakarParams{a, mu, nu}, x);
}

struct Shape {
  double a, b, tau, B;
  bool jws;
};

Shape shape_of(const KernelConfig& cfg) {
  validate(cfg);
  const ModelSpec p = pinned(cfg.spec);
  return {p.alpha, p.beta, p.tau, cfg.rate_B, jws_family(p.kind)};
}

// HN family: (1 + u^a)^b - 1.  JWS family: (1 + u^-a)^b - 1.  u = s tau.
double excess(const Shape& sh, double u) {
  const double w = sh.jws ? std::pow(u, -sh.a) : std::pow(u, sh.a);
  return std::expm1(sh.b * std::log1p(w));
}

cplx excess(const Shape& sh, cplx u) {
  const cplx w = cpow(u, sh.jws ? -sh.a : sh.a);
  return cexpm1(sh.b * clog1p(w));
}

double checked(double v, const char* what) {
  if (!std::isfinite(v) || v <= 0.0)
    throw DomainError(std::string(what) + ": phi-hat(s) is 1 to working precision or s is out of range");
  return v;
}

void check_s(double s) {
  if (!(s > 0.0) || !std::isfinite(s)) throw DomainError("kernel transforms need s > 0");
}

// Sum of a positive-index series with a geometric tail bound from the last
// two terms.
template <class Term>
KernelValue sum_series(Term term, int cap) {
  KernelValue out;
  double sum = 0.0, prev = 0.0, tail = std::numeric_limits<double>::infinity();
  int zeros = 0;
  for (int r = 0; r < cap; ++r) {
    const double a = term(r);
    sum += a;
    const double m = std::fabs(a);
    if (m == 0.0) {
      if (++zeros >= 2) {
        tail = 0.0;
        break;
      }
    } else {
      zeros = 0;
    }
    if (r > 0 && prev > 0.0) {
      const double rho = m / prev;
      tail = rho < 1.0 ? m * rho / (1.0 - rho) : std::numeric_limits<double>::infinity();
      if (tail <= 1e-15 * std::fabs(sum)) break;
    }
    prev = m;
  }
  out.regular = sum;
  out.tail_bound = tail;
  out.truncated = !(tail <= 1e-8 * std::max(std::fabs(sum), 1e-300));
  return out;
}

// u^(-alpha beta) E^{-beta}_{alpha,1-alpha beta}(-(u/tau)^alpha), the kernel of the
// Prabhakar-like operator of the HN family.
double prabhakar_kernel(const Shape& sh, double u) {
  const double ab = sh.a * sh.b, x = u / sh.tau;
  return std::pow(u, -ab) * E(sh.a, 1.0 - ab, -sh.b, std::pow(x, sh.a));
}

// int_0^t f(xi, t - xi) dxi where f ~ xi^(p-1) at 0 and ~ (t - xi)^(q-1) at t.
// The power substitutions make both halves smooth.
double singular_convolution(const std::function<double(double, double)>& f, double t,
                            double p, double q) {
  const double h = 0.5 * t;
  auto left = [&](double v) {
    if (v <= 0.0) return 0.0;
    const double xi = h * std::pow(v, 1.0 / p);
    if (xi <= 0.0) return 0.0;
    return f(xi, t - xi) * h / p * std::pow(v, 1.0 / p - 1.0);
  };
  auto right = [&](double v) {
    if (v <= 0.0) return 0.0;
    const double r = h * std::pow(v, 1.0 / q);
    if (r <= 0.0) return 0.0;
    return f(t - r, r) * h / q * std::pow(v, 1.0 / q - 1.0);
  };
  return integrate_finite(left, 0.0, 1.0, 1e-11) + integrate_finite(right, 0.0, 1.0, 1e-11);
}

}  // namespace

bool has_kernels(ModelKind kind) { return kind != ModelKind::KWW; }

void validate(const KernelConfig& cfg) {
  validate(cfg.spec);
  if (!has_kernels(cfg.spec.kind)) throw DomainError("KWW has no memory-kernel pair");
  if (!(cfg.rate_B > 0.0) || !std::isfinite(cfg.rate_B))
    throw DomainError("rate_B must be positive");
  if (cfg.series_terms < 1) throw DomainError("series_terms must be at least 1");
}

double characteristic_exponent(const KernelConfig& cfg, double s) {
  check_s(s);
  const Shape sh = shape_of(cfg);
  const double e = excess(sh, s * sh.tau);
  return checked(sh.jws ? sh.B / e : sh.B * e, "characteristic_exponent");
}

double memory_M_hat(const KernelConfig& cfg, double s) {
  check_s(s);
  const Shape sh = shape_of(cfg);
  const double e = excess(sh, s * sh.tau);
  return checked(sh.jws ? e / sh.B : 1.0 / (sh.B * e), "memory_M_hat");
}

double memory_k_hat(const KernelConfig& cfg, double s) {
  check_s(s);
  const Shape sh = shape_of(cfg);
  const double e = excess(sh, s * sh.tau);
  return checked(sh.jws ? sh.B / (s * e) : sh.B * e / s, "memory_k_hat");
}

cplx exponent_image(const KernelConfig& cfg, cplx z) {
  const Shape sh = shape_of(cfg);
  const cplx e = excess(sh, z * sh.tau);
  return sh.jws ? sh.B / e : sh.B * e;
}

cplx memory_M_image(const KernelConfig& cfg, cplx z) {
  const Shape sh = shape_of(cfg);
  const cplx e = excess(sh, z * sh.tau);
  return sh.jws ? e / sh.B : 1.0 / (sh.B * e);
}

cplx memory_k_image(const KernelConfig& cfg, cplx z) {
  const Shape sh = shape_of(cfg);
  const cplx e = excess(sh, z * sh.tau);
  return sh.jws ? sh.B / (z * e) : sh.B * e / z;
}

KernelValue memory_M_time(const KernelConfig& cfg, double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("kernels need t > 0");
  const Shape sh = shape_of(cfg);
  const double x = t / sh.tau, a = sh.a, b = sh.b;
  KernelValue out;
  if (sh.jws) {
    out.regular = E(a, 0.0, -b, std::pow(x, a)) / (sh.B * t);
    return out;
  }
  if (b == 1.0) {
    // Debye and CC: M-hat = 1 / (B (s tau)^alpha).
    out.regular = std::pow(x, a - 1.0) / (sh.B * sh.tau * std::tgamma(a));
    return out;
  }
  const double xa = std::pow(x, a);
  out = sum_series(
      [&](int r) {
        const double nu = b * (1.0 + r);
        return std::pow(x, a * nu) * E(a, a * nu, nu, xa);
      },
      cfg.series_terms);
  out.regular /= sh.B * t;
  out.tail_bound /= sh.B * t;
  return out;
}

KernelValue memory_k_time(const KernelConfig& cfg, double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("kernels need t > 0");
  const Shape sh = shape_of(cfg);
  const double x = t / sh.tau, a = sh.a, b = sh.b, ab = a * b;
  KernelValue out;
  if (!sh.jws) {
    if (ab == 1.0) out.singular_weight = sh.B * sh.tau;
    if (a == 1.0 && b == 1.0) return out;
    out.regular = sh.B * (std::pow(x, -ab) * E(a, 1.0 - ab, -b, std::pow(x, a)) - 1.0);
    return out;
  }
  if (a == 1.0) {
    // MCD: k-hat tends to B tau / beta, so k carries that delta weight. The
    // regular part comes from the contour inversion of the remainder.
    out.singular_weight = sh.B * sh.tau / b;
    auto F = [&](cplx z) { return memory_k_image(cfg, z) - out.singular_weight; };
    out.regular = talbot_invert(F, t, 48);
    return out;
  }
  const double xa = std::pow(x, a);
  out = sum_series([&](int r) { return E(a, 1.0, b * (1.0 + r), xa); },
                   std::min(cfg.series_terms, 200));
  if (!(out.tail_bound <= 1e-13 * std::fabs(out.regular))) {
    // At short times the terms decay too slowly; invert k-hat instead.
    auto F = [&](cplx z) { return memory_k_image(cfg, z); };
    const double fine = talbot_invert(F, t, 48);
    out.regular = fine;
    out.tail_bound = std::fabs(fine - talbot_invert(F, t, 32));
    out.truncated = !(out.tail_bound <= 1e-8 * std::fabs(fine));
    return out;
  }
  out.regular *= sh.B;
  out.tail_bound *= sh.B;
  return out;
}

double evolution_residual_at(const KernelConfig& cfg, double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("evolution residual needs t > 0");
  const Shape sh = shape_of(cfg);
  const ModelSpec& spec = cfg.spec;
  const double ab = sh.a * sh.b;
  if (sh.jws) {
    // n(t) + B (M * n)(t) = 1; B M(u) ~ u^(alpha - 1) near 0.
    auto f = [&](double xi, double r) {
      return sh.B * memory_M_time(cfg, r).regular * relaxation(spec, xi);
    };
    const double conv = singular_convolution(f, t, 1.0, sh.a);
    return relaxation(spec, t) + conv - 1.0;
  }
  // (k * n')(t) + k_delta n'(t) + B n(t) = 0; n' ~ xi^(ab - 1), k ~ u^(-ab).
  const KernelValue kt = memory_k_time(cfg, t);
  double conv = 0.0;
  if (!(sh.a == 1.0 && sh.b == 1.0)) {
    auto f = [&](double xi, double r) {
      return memory_k_time(cfg, r).regular * -response(spec, xi).regular;
    };
    conv = singular_convolution(f, t, ab, ab < 1.0 ? 1.0 - ab : 1.0);
  }
  const double local = kt.singular_weight * -response(spec, t).regular;
  return (conv + local + sh.B * relaxation(spec, t)) / sh.B;
}

double evolution_residual(const KernelConfig& cfg, const std::vector<double>& t_grid) {
  validate(cfg);
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > 0.0)) throw DomainError("evolution residual grid must be positive");
    if (i > 0 && !(t_grid[i] >= t_grid[i - 1]))
      throw DomainError("evolution residual grid must be sorted");
  }
  auto res = parallel_map(t_grid.size(),
                          [&](std::size_t i) { return evolution_residual_at(cfg, t_grid[i]); });
  double worst = 0.0;
  for (double r : res) worst = std::max(worst, std::fabs(r));
  return worst;
}

OperatorPair operator_relation(const ModelSpec& spec, double t) {
  validate(spec);
  if (jws_family(spec.kind) || spec.kind == ModelKind::KWW)
    throw DomainError("operator relation is defined for Debye, CC, CD and HN");
  if (!(t > 0.0)) throw DomainError("operator relation needs t > 0");
  const ModelSpec p = pinned(spec);
  const Shape sh{p.alpha, p.beta, p.tau, 1.0, false};
  const double ab = sh.a * sh.b;
  if (!(ab < 1.0)) throw DomainError("operator relation needs alpha beta < 1");
  OperatorPair out;
  auto fc = [&](double xi, double r) {
    return prabhakar_kernel(sh, r) * -response(spec, xi).regular;
  };
  out.caputo = singular_convolution(fc, t, ab, 1.0 - ab);
  // G(T) = int_0^T K(u) n(T - u) du; the derivative by Richardson-extrapolated
  // central differences.
  auto G = [&](double T) {
    auto f = [&](double u, double r) { return prabhakar_kernel(sh, u) * relaxation(spec, r); };
    return singular_convolution(f, T, 1.0 - ab, 1.0);
  };
  const double h = 1e-2 * t;
  auto D = [&](double hh) { return (G(t + hh) - G(t - hh)) / (2.0 * hh); };
  const double d1 = D(h), d2 = D(0.5 * h);
  const double rl = (4.0 * d2 - d1) / 3.0;
  out.riemann_liouville = rl - prabhakar_kernel(sh, t) * 1.0;
  return out;
}

double subordinated_relaxation(const KernelConfig& cfg, Parent parent, double t) {
  if (!(t > 0.0)) throw DomainError("subordination needs t > 0");
  const Shape sh = shape_of(cfg);
  if (parent == Parent::DebyeParent) {
    if (sh.jws && sh.a == 1.0)
      throw DomainError("Debye-parent subordination needs alpha < 1 for the JWS family");
    auto f_psi = [&](double xi, double tt) {
      auto F = [&](cplx z) {
        const cplx psi = exponent_image(cfg, z);
        return psi * std::exp(-xi * psi) / z;
      };
      return std::max(0.0, talbot_invert(F, tt, 48));
    };
    return efros_compose([&](double xi) { return std::exp(-sh.B * xi); }, f_psi, t);
  }
  if (!(sh.a < 1.0)) throw DomainError("stable-parent subordination needs alpha < 1");
  const double T = std::pow(sh.tau, sh.a);
  std::function<double(double)> n_parent;
  if (sh.jws)
    n_parent = [&](double u) { return E(1.0, 1.0, sh.b, u / T); };
  else
    n_parent = [&](double u) { return boost::math::gamma_q(sh.b, u / T); };
  auto kern = [&](double u, double tt) { return subordination_kernel(sh.a, u, tt); };
  return efros_compose(n_parent, kern, t);
}

}  // namespace relaxkit
