#include "relaxkit/laplace.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "relaxkit/quadrature.hpp"
#include "relaxkit/specfun.hpp"

namespace relaxkit {

namespace {

// Cotangent contour s(th) = (N/t)(sigma + mu th cot(a th) + i nu th).
constexpr double kSigma = -0.6122;
constexpr double kMu = 0.5017;
constexpr double kA = 0.6407;
constexpr double kNu = 0.2645;

template <class Real>
std::vector<Real> stehfest_weights(int n) {
  auto fact = [](int k) {
    Real f = 1;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
  };
  const int h = n / 2;
  std::vector<Real> v(n + 1, Real(0));
  for (int k = 1; k <= n; ++k) {
    Real s = 0;
    for (int j = (k + 1) / 2; j <= std::min(k, h); ++j) {
      s += pow(Real(j), h) * fact(2 * j) /
           (fact(h - j) * fact(j) * fact(j - 1) * fact(k - j) * fact(2 * j - k));
    }
    v[k] = ((k + h) % 2 == 0 ? 1 : -1) * s;
  }
  return v;
}

void check_stehfest(double t, int order) {
  if (!(t > 0.0)) throw DomainError("inverse Laplace transform needs t > 0");
  if (order < 8 || order % 2 != 0) throw DomainError("Gaver-Stehfest needs an even order >= 8");
}

}  // namespace

void validate(const InversionConfig& cfg) {
  if (cfg.method == InversionMethod::Talbot) {
    if (cfg.nodes < 16 || cfg.nodes % 2 != 0)
      throw DomainError("Talbot inversion needs an even node count >= 16");
  } else {
    if (cfg.nodes < 8 || cfg.nodes % 2 != 0)
      throw DomainError("Gaver-Stehfest inversion needs an even order >= 8");
  }
}

double talbot_invert(const std::function<cplx(cplx)>& F, double t, int nodes) {
  if (!(t > 0.0)) throw DomainError("inverse Laplace transform needs t > 0");
  if (nodes < 16 || nodes % 2 != 0) throw DomainError("Talbot needs an even node count >= 16");
  const double scale = nodes / t;
  const double h = 2.0 * std::numbers::pi / nodes;
  double sum = 0.0;
  for (int k = 0; k < nodes / 2; ++k) {
    const double th = (k + 0.5) * h;
    const double cot = 1.0 / std::tan(kA * th);
    const double sn = std::sin(kA * th);
    const cplx s = scale * cplx(kSigma + kMu * th * cot, kNu * th);
    const cplx ds = scale * cplx(kMu * cot - kMu * kA * th / (sn * sn), kNu);
    sum += std::imag(std::exp(s * t) * F(s) * ds);
  }
  return 2.0 * sum / nodes;
}

double stehfest_invert(const std::function<double(double)>& F, double t, int order) {
  check_stehfest(t, order);
  thread_local int cached_order = 0;
  thread_local std::vector<long double> w;
  if (cached_order != order) {
    w = stehfest_weights<long double>(order);
    cached_order = order;
  }
  const long double ln2t = std::numbers::ln2_v<long double> / t;
  long double sum = 0.0L;
  for (int k = 1; k <= order; ++k)
    sum += w[k] * static_cast<long double>(F(static_cast<double>(k * ln2t)));
  return static_cast<double>(ln2t * sum);
}

double stehfest_invert(const std::function<mp_real(const mp_real&)>& F, double t,
                       int order) {
  check_stehfest(t, order);
  thread_local int cached_order = 0;
  thread_local std::vector<mp_real> w;
  if (cached_order != order) {
    w = stehfest_weights<mp_real>(order);
    cached_order = order;
  }
  const mp_real ln2t = log(mp_real(2)) / mp_real(t);
  mp_real sum = 0;
  for (int k = 1; k <= order; ++k) sum += w[k] * F(k * ln2t);
  return static_cast<double>(ln2t * sum);
}

int default_stehfest_order(const LaplaceImage& image) {
  return image.real_evaluator ? 32 : 16;
}

InversionResult inverse_laplace(const LaplaceImage& image, double t,
                                const InversionConfig& cfg) {
  validate(cfg);
  if (!image.evaluator) throw DomainError("inverse_laplace: empty image");
  if (image.singular_weight < 0.0) throw DomainError("inverse_laplace: negative singular weight");
  // Shift past the convergence abscissa: f(t) = e^{ct} L^{-1}[F(s + c)](t).
  const double c = image.abscissa > 0.0 ? image.abscissa + 1.0 : 0.0;
  auto shifted = [&](cplx s) { return image.evaluator(s + c); };
  auto real_shifted = [&](double s) { return std::real(image.evaluator(cplx(s + c, 0.0))); };
  auto stehfest = [&](int order) {
    if (image.real_evaluator) {
      std::function<mp_real(const mp_real&)> g = [&](const mp_real& s) {
        return image.real_evaluator(s + mp_real(c));
      };
      return stehfest_invert(g, t, order);
    }
    return stehfest_invert(std::function<double(double)>(real_shifted), t, order);
  };
  const double growth = std::exp(c * t);

  InversionResult out;
  out.singular_weight = image.singular_weight;
  const int talbot_nodes = cfg.method == InversionMethod::Talbot ? cfg.nodes : 32;
  const int stehfest_order =
      cfg.method == InversionMethod::GaverStehfest ? cfg.nodes : default_stehfest_order(image);
  double primary = 0.0, other = 0.0;
  if (cfg.method == InversionMethod::Talbot) {
    primary = growth * talbot_invert(shifted, t, talbot_nodes);
    if (cfg.cross_check) other = growth * stehfest(stehfest_order);
  } else {
    primary = growth * stehfest(stehfest_order);
    if (cfg.cross_check) other = growth * talbot_invert(shifted, t, talbot_nodes);
  }
  out.value = primary;
  if (cfg.cross_check) {
    const double tal = cfg.method == InversionMethod::Talbot ? primary : other;
    const double ste = cfg.method == InversionMethod::Talbot ? other : primary;
    const double denom = std::max(std::fabs(tal), 1e-300);
    const double rel = std::fabs(tal - ste) / denom;
    if (!(rel <= 1e-6)) {
      out.disagreement = InversionDisagreement{
          tal, ste, rel, "Talbot and Gaver-Stehfest disagree beyond 1e-6 relative"};
    }
  }
  return out;
}

double forward_laplace(const std::function<double(double)>& f, double z,
                       double tail_exponent, double rel_tol) {
  if (!(z > 0.0)) throw DomainError("forward_laplace needs z > 0");
  const double T = 60.0 / z;
  auto g = [&](double t) { return std::exp(-z * t) * f(t); };
  std::vector<double> cuts = {0.0, 1e-10, 1e-8, 1e-6, 1e-4, 1e-3, 1e-2, 0.03, 0.1, 0.3, 1.0};
  for (double& c : cuts) c *= T;
  double sum = integrate_panels(g, cuts, rel_tol);
  // Power-law tail f(t) ~ f(T) (t/T)^p beyond T.
  const double fT = f(T);
  auto tail = [&](double t) { return std::exp(-z * t) * std::pow(t / T, tail_exponent); };
  sum += fT * integrate_to_infinity(tail, T, std::max(rel_tol, 1e-10));
  return sum;
}

double efros_compose(const std::function<double(double)>& h,
                     const std::function<double(double, double)>& kernel, double t) {
  if (!(t > 0.0)) throw DomainError("efros_compose needs t > 0");
  // Mass concentration: maximum of xi k(xi, t) on a logarithmic scan.
  double best = -1.0, pivot = 1.0;
  for (int i = 0; i <= 200; ++i) {
    const double xi = std::pow(10.0, -10.0 + 0.1 * i);
    const double m = xi * kernel(xi, t);
    if (std::isfinite(m) && m > best) {
      best = m;
      pivot = xi;
    }
  }
  auto g = [&](double xi) { return xi > 0.0 ? h(xi) * kernel(xi, t) : 0.0; };
  double v = integrate_half_line(g, pivot, 1e-11);
  if (!std::isfinite(v)) throw QuadratureFailure("efros_compose: non-finite result");
  return v;
}

double subordination_kernel(double alpha, double u, double t) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("subordination kernel needs 0 < alpha < 1");
  if (!(u > 0.0) || !(t > 0.0)) throw DomainError("subordination kernel needs u, t > 0");
  // Near u = 0 the kernel is t^-alpha M_alpha(u t^-alpha) with the entire Wright
  // series M_alpha(z) = sum_k (-z)^k / (k! Gamma(1 - alpha - alpha k)).
  const double z = u * std::pow(t, -alpha);
  if (z <= 1.0) {
    double sum = rgamma(1.0 - alpha);
    const double lz = std::log(z);
    for (int k = 1; z > 0.0 && k < 400; ++k) {
      const SignedLog g = lgamma_signed(1.0 - alpha - alpha * k);
      if (g.sign == 0) continue;
      const double lmag = k * lz - std::lgamma(k + 1.0) - g.log_abs;
      const double term = ((k % 2 == 0) ? 1.0 : -1.0) * g.sign * std::exp(lmag);
      sum += term;
      // |1/Gamma(1 - x)| <= Gamma(x) / pi bounds the rest independently of
      // near-pole cancellations.
      const double bound = std::exp(k * lz - std::lgamma(k + 1.0) + std::lgamma(alpha * (k + 1)));
      if (bound <= 1e-17 * std::fabs(sum)) break;
    }
    return std::pow(t, -alpha) * sum;
  }
  const double arg = t * std::pow(u, -1.0 / alpha);
  if (!std::isfinite(arg) || arg == 0.0) return 0.0;
  return arg * levy_stable_density(alpha, arg) / (alpha * u);
}

}  // namespace relaxkit
