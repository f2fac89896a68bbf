#include "relaxkit/models.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cctype>
#include <cmath>
#include <numbers>

#include "cmath_ext.hpp"
#include "series.hpp"

namespace relaxkit {

using cplx = std::complex<double>;

namespace {

constexpr double kPi = std::numbers::pi;

// Which closed form a spec is evaluated with.
enum class Path { Debye, CC, CD, MCD, HN, JWS, KWW };

Path path_of(const ModelSpec& s, bool reduce) {
  const bool a1 = s.alpha == 1.0, b1 = s.beta == 1.0;
  switch (s.kind) {
    case ModelKind::Debye:
      return Path::Debye;
    case ModelKind::CC:
      return reduce && a1 ? Path::Debye : Path::CC;
    case ModelKind::CD:
      return reduce && b1 ? Path::Debye : Path::CD;
    case ModelKind::MCD:
      return reduce && b1 ? Path::Debye : Path::MCD;
    case ModelKind::KWW:
      return reduce && a1 ? Path::Debye : Path::KWW;
    case ModelKind::HN:
      if (!reduce) return Path::HN;
      if (a1 && b1) return Path::Debye;
      if (a1) return Path::CD;
      if (b1) return Path::CC;
      return Path::HN;
    case ModelKind::JWS:
      if (!reduce) return Path::JWS;
      if (a1 && b1) return Path::Debye;
      if (a1) return Path::MCD;
      if (b1) return Path::CC;
      return Path::JWS;
  }
  return Path::HN;
}

bool jws_family(ModelKind k) { return k == ModelKind::JWS || k == ModelKind::MCD; }

double E(double a, double mu, double nu, double x, const EvalStrategy& s) {
  return prabhakar(PrabhakarParams{a, mu, nu}, x, s);
}

using detail::cexpm1;
using detail::clog1p;
using detail::cpow;

// phi-hat as a function of u = z tau.
cplx phi_hat(Path p, double a, double b, cplx u) {
  switch (p) {
    case Path::Debye:
      return 1.0 / (1.0 + u);
    case Path::CC:
      return 1.0 / (1.0 + cpow(u, a));
    case Path::CD:
      return std::exp(-b * clog1p(u));
    case Path::HN:
      return std::exp(-b * clog1p(cpow(u, a)));
    case Path::MCD:
      return -cexpm1(-b * clog1p(1.0 / u));
    case Path::JWS:
      return -cexpm1(-b * clog1p(cpow(u, -a)));
    case Path::KWW:
      break;
  }
  throw DomainError("KWW has no closed-form spectral function");
}

mp_real phi_hat_mp(Path p, double a, double b, const mp_real& u) {
  const mp_real A(a), B(b);
  switch (p) {
    case Path::Debye:
      return 1 / (1 + u);
    case Path::CC:
      return 1 / (1 + pow(u, A));
    case Path::CD:
      return pow(1 + u, -B);
    case Path::HN:
      return pow(1 + pow(u, A), -B);
    case Path::MCD:
      return 1 - pow(1 + 1 / u, -B);
    case Path::JWS:
      return 1 - pow(1 + pow(u, -A), -B);
    case Path::KWW:
      break;
  }
  throw DomainError("KWW has no closed-form spectral function");
}

void check_time(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("time must be finite and nonnegative");
}

double response_regular(const ModelSpec& sp, double t, const EvalOptions& opt) {
  const double a = sp.alpha, b = sp.beta, tau = sp.tau, x = t / tau;
  const auto& s = opt.strategy;
  switch (path_of(sp, opt.use_reductions)) {
    case Path::Debye:
      return std::exp(-x) / tau;
    case Path::CC:
      return std::pow(x, a - 1.0) * E(a, a, 1.0, std::pow(x, a), s) / tau;
    case Path::CD:
      return std::exp((b - 1.0) * std::log(x) - x - std::lgamma(b)) / tau;
    case Path::HN:
      return std::pow(x, a * b - 1.0) * E(a, a * b, b, std::pow(x, a), s) / tau;
    case Path::MCD:
      return b / tau * E(1.0, 2.0, b + 1.0, x, s);
    case Path::JWS:
      return -E(a, 0.0, b, std::pow(x, a), s) / (tau * x);
    case Path::KWW:
      return a / tau * std::pow(x, a - 1.0) * std::exp(-std::pow(x, a));
  }
  return 0.0;
}

void check_regime(const ModelSpec& sp) {
  if (sp.override_regime) return;
  if (sp.beta > 1.0 / sp.alpha * (1.0 + 1e-15))
    throw DomainError("beta exceeds 1/alpha; the density has a negative part there");
}

double pdf_trig(Path p, double a, double b, double xi) {
  switch (p) {
    case Path::CC: {
      const double xa = std::pow(xi, a);
      return std::pow(xi, a - 1.0) * std::sin(a * kPi) /
             (kPi * (xa * xa + 2.0 * xa * std::cos(a * kPi) + 1.0));
    }
    case Path::CD:
      return xi > 1.0 ? std::sin(b * kPi) / (kPi * xi * std::pow(xi - 1.0, b)) : 0.0;
    case Path::MCD:
      return xi < 1.0 ? std::sin(b * kPi) / (kPi * xi * std::pow(1.0 / xi - 1.0, b)) : 0.0;
    case Path::HN: {
      const double xa = std::pow(xi, a);
      const double den = xa * xa + 2.0 * xa * std::cos(a * kPi) + 1.0;
      // theta_alpha(xi) with both components scaled by xi^alpha
      const double th = std::atan2(xa * std::sin(a * kPi), 1.0 + xa * std::cos(a * kPi));
      return std::sin(b * th) / (kPi * xi * std::pow(den, 0.5 * b));
    }
    case Path::JWS: {
      const double xa = std::pow(xi, a);
      const double den = xa * xa + 2.0 * xa * std::cos(a * kPi) + 1.0;
      const double th = std::atan2(std::sin(a * kPi), xa + std::cos(a * kPi));
      return std::pow(xi, a * b - 1.0) * std::sin(b * th) / (kPi * std::pow(den, 0.5 * b));
    }
    default:
      break;
  }
  throw DomainError("no density for this model");
}

// Arctan branch with a sign flip where the arctan denominator changes sign.
double pdf_split_sign(Path p, double a, double b, double xi) {
  const double xa = std::pow(xi, a);
  const double den = xa * xa + 2.0 * xa * std::cos(a * kPi) + 1.0;
  if (p == Path::HN || p == Path::CC) {
    const double d = 1.0 + xa * std::cos(a * kPi);
    const double th = std::atan(xa * std::sin(a * kPi) / d);
    const double sign = d > 0.0 ? 1.0 : -1.0;
    return sign * std::sin(b * th) / (kPi * xi * std::pow(den, 0.5 * b));
  }
  if (p == Path::JWS) {
    const double d = xa + std::cos(a * kPi);
    const double th = std::atan(std::sin(a * kPi) / d);
    const double sign = d > 0.0 ? 1.0 : -1.0;
    return sign * std::pow(xi, a * b - 1.0) * std::sin(b * th) / (kPi * std::pow(den, 0.5 * b));
  }
  throw DomainError("split-sign form exists only for HN, JWS and CC");
}

// (1/pi) sum_n (-1)^n (beta)_n / n! xi^(sgn alpha (beta + n) - 1) sin(alpha (beta + n) pi)
double pdf_series(bool jws, double a, double b, double xi, const EvalStrategy& s) {
  if (!jws && !(xi > 1.0)) throw DomainError("HN density series needs xi > 1");
  if (jws && !(xi < 1.0)) throw DomainError("JWS density series needs xi < 1");
  const long double lx = std::log(static_cast<long double>(xi));
  const long double sgn = jws ? 1.0L : -1.0L;
  long double sum = 0.0L, c = 1.0L;
  int small_run = 0;
  for (int n = 0; n < s.series_max_terms; ++n) {
    const long double e = a * (b + n);
    const long double term =
        c * std::exp(sgn * e * lx - lx) * std::sin(e * std::numbers::pi_v<long double>);
    sum += term;
    if (std::fabs(term) <= s.rel_tolerance * std::fabs(sum)) {
      if (++small_run >= 3) return static_cast<double>(sum / std::numbers::pi_v<long double>);
    } else {
      small_run = 0;
    }
    c *= -(b + n) / (n + 1);
  }
  throw ConvergenceFailure("density series did not converge");
}

// Finite sum of k hypergeometric series for alpha = l/k.
double pdf_hypergeometric(bool jws, double a, double b, double xi, const EvalStrategy& s) {
  auto q = rational_order(a);
  if (!q || q->l >= q->k) throw DomainError("hypergeometric density form needs rational alpha < 1");
  const int l = q->l, k = q->k;
  const double arg = ((l - k) % 2 == 0 ? 1.0 : -1.0) * std::pow(xi, jws ? l : -l);
  if (!(std::fabs(arg) < 1.0)) throw DomainError("hypergeometric density form diverges here");
  double total = 0.0, c = 1.0;
  for (int j = 0; j < k; ++j) {
    const double nj = b + j;
    const double expo = jws ? a * nj - 1.0 : -1.0 - a * nj;
    std::vector<double> num{1.0}, den;
    for (int i = 0; i < k; ++i) num.push_back((nj + i) / k);
    for (int i = 0; i < k; ++i) den.push_back((1.0 + j + i) / k);
    total += c * std::pow(xi, expo) * std::sin(a * nj * kPi) * hyper_pfq(num, den, arg, s);
    c *= -(b + j) / (j + 1);
  }
  return total / kPi;
}

}  // namespace

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Debye: return "debye";
    case ModelKind::CC: return "cc";
    case ModelKind::CD: return "cd";
    case ModelKind::MCD: return "mcd";
    case ModelKind::HN: return "hn";
    case ModelKind::JWS: return "jws";
    case ModelKind::KWW: return "kww";
  }
  return "?";
}

ModelKind parse_model_kind(const std::string& name) {
  std::string n = name;
  std::transform(n.begin(), n.end(), n.begin(), [](unsigned char c) { return std::tolower(c); });
  for (ModelKind k : {ModelKind::Debye, ModelKind::CC, ModelKind::CD, ModelKind::MCD,
                      ModelKind::HN, ModelKind::JWS, ModelKind::KWW})
    if (to_string(k) == n) return k;
  throw DomainError("unknown model '" + name + "'");
}

int shape_parameter_count(ModelKind kind) {
  switch (kind) {
    case ModelKind::Debye: return 0;
    case ModelKind::HN:
    case ModelKind::JWS: return 2;
    default: return 1;
  }
}

ModelSpec pinned(ModelSpec s) {
  switch (s.kind) {
    case ModelKind::Debye: s.alpha = s.beta = 1.0; break;
    case ModelKind::CC:
    case ModelKind::KWW: s.beta = 1.0; break;
    case ModelKind::CD:
    case ModelKind::MCD: s.alpha = 1.0; break;
    default: break;
  }
  return s;
}

void validate(const ModelSpec& s) {
  if (!(s.tau > 0.0) || !std::isfinite(s.tau)) throw DomainError("tau must be positive");
  if (!(s.alpha > 0.0 && s.alpha <= 1.0)) throw DomainError("alpha must lie in (0, 1]");
  if (!(s.beta > 0.0) || !std::isfinite(s.beta)) throw DomainError("beta must be positive");
  const ModelSpec p = pinned(s);
  if (p.alpha != s.alpha || p.beta != s.beta)
    throw DomainError(to_string(s.kind) + " fixes alpha or beta to 1");
  if (s.strict_experimental && s.beta > 1.0)
    throw DomainError("beta must lie in (0, 1] under strict_experimental");
  check_regime(s);
}

void validate(const PermittivityScale& sc) {
  if (!std::isfinite(sc.eps_static) || !std::isfinite(sc.eps_inf) || !(sc.eps_static > sc.eps_inf))
    throw DomainError("eps_static must exceed eps_inf");
}

double theta(double alpha, double y) {
  if (!(y > 0.0)) throw DomainError("theta needs y > 0");
  return std::atan2(std::sin(kPi * alpha), std::pow(y, -alpha) + std::cos(kPi * alpha));
}

cplx spectral(const ModelSpec& spec, double omega_tau) {
  validate(spec);
  if (!(omega_tau >= 0.0)) throw DomainError("omega tau must be nonnegative");
  if (spec.kind == ModelKind::KWW) throw DomainError("KWW has no closed-form spectral function");
  if (omega_tau == 0.0) return 1.0;
  if (std::isinf(omega_tau)) return 0.0;
  return phi_hat(path_of(spec, true), spec.alpha, spec.beta, cplx(0.0, omega_tau));
}

cplx spectral_image(const ModelSpec& spec, cplx z) {
  validate(spec);
  if (!(z.real() > 0.0) && !(z.real() == 0.0 && z.imag() != 0.0))
    throw DomainError("spectral image needs Re z > 0");
  return phi_hat(path_of(spec, true), spec.alpha, spec.beta, z * spec.tau);
}

LaplaceImage response_image(const ModelSpec& spec) {
  validate(spec);
  if (spec.kind == ModelKind::KWW) throw DomainError("KWW has no closed-form spectral function");
  const Path p = path_of(spec, true);
  const double a = spec.alpha, b = spec.beta, tau = spec.tau;
  LaplaceImage img;
  img.evaluator = [=](cplx z) { return phi_hat(p, a, b, z * tau); };
  img.real_evaluator = [=](const mp_real& z) { return phi_hat_mp(p, a, b, z * mp_real(tau)); };
  return img;
}

Permittivity permittivity(const ModelSpec& spec, const PermittivityScale& scale, double omega,
                          PermittivityRoute route) {
  validate(spec);
  validate(scale);
  if (!(omega >= 0.0)) throw DomainError("omega must be nonnegative");
  if (spec.kind == ModelKind::KWW) throw DomainError("KWW has no closed-form permittivity");
  const double d = scale.eps_static - scale.eps_inf;
  const double wt = omega * spec.tau;
  if (route == PermittivityRoute::Auto)
    route = spec.kind == ModelKind::HN || spec.kind == ModelKind::JWS ? PermittivityRoute::Trigonometric
                                                                      : PermittivityRoute::Spectral;
  if (route == PermittivityRoute::Spectral) {
    const cplx ph = spectral(spec, wt);
    return {scale.eps_inf + d * ph.real(), -d * ph.imag()};
  }
  if (wt == 0.0) return {scale.eps_static, 0.0};
  const double a = spec.alpha, b = spec.beta;
  const double w = std::pow(wt, a);
  const double c = std::cos(0.5 * kPi * a), s = std::sin(0.5 * kPi * a);
  const double den = std::pow(1.0 + 2.0 * w * c + w * w, 0.5 * b);
  if (!jws_family(spec.kind)) {
    // theta_{alpha/2}((omega tau)^2)
    const double th = std::atan2(w * s, 1.0 + w * c);
    return {scale.eps_inf + d * std::cos(b * th) / den, d * std::sin(b * th) / den};
  }
  // theta_{alpha/2}((omega tau)^-2)
  const double th = std::atan2(s, w + c);
  const double amp = d * std::pow(wt, a * b) / den;
  return {scale.eps_static - amp * std::cos(b * th), amp * std::sin(b * th)};
}

TimeResponse response(const ModelSpec& spec, double t, const EvalOptions& opt) {
  validate(spec);
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("response needs t > 0");
  return {0.0, response_regular(spec, t, opt)};
}

double relaxation(const ModelSpec& spec, double t, const EvalOptions& opt) {
  validate(spec);
  check_time(t);
  if (t == 0.0) return 1.0;
  const double a = spec.alpha, b = spec.beta, x = t / spec.tau;
  const auto& s = opt.strategy;
  switch (path_of(spec, opt.use_reductions)) {
    case Path::Debye:
      return std::exp(-x);
    case Path::CC:
      return E(a, 1.0, 1.0, std::pow(x, a), s);
    case Path::CD:
      return boost::math::gamma_q(b, x);
    case Path::HN:
      return 1.0 - std::pow(x, a * b) * E(a, 1.0 + a * b, b, std::pow(x, a), s);
    case Path::MCD:
      return E(1.0, 1.0, b, x, s);
    case Path::JWS:
      return E(a, 1.0, b, std::pow(x, a), s);
    case Path::KWW:
      return std::exp(-std::pow(x, a));
  }
  return 0.0;
}

double relaxation_derivative(const ModelSpec& spec, double t, int order, const EvalOptions& opt) {
  validate(spec);
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("derivatives need t > 0");
  if (order == 1) return -response_regular(spec, t, opt);
  if (order != 2) throw DomainError("only first and second derivatives are provided");
  const double a = spec.alpha, b = spec.beta, tau = spec.tau, x = t / tau, t2 = tau * tau;
  const auto& s = opt.strategy;
  switch (path_of(spec, opt.use_reductions)) {
    case Path::Debye:
      return std::exp(-x) / t2;
    case Path::CC:
      return -std::pow(x, a - 2.0) * E(a, a - 1.0, 1.0, std::pow(x, a), s) / t2;
    case Path::CD:
      return std::exp((b - 2.0) * std::log(x) - x - std::lgamma(b)) * (1.0 + x - b) / t2;
    case Path::HN:
      return -std::pow(x, a * b - 2.0) * E(a, a * b - 1.0, b, std::pow(x, a), s) / t2;
    case Path::MCD:
      return b * (b + 1.0) * E(1.0, 3.0, b + 2.0, x, s) / t2;
    case Path::JWS:
      return E(a, -1.0, b, std::pow(x, a), s) / (x * x * t2);
    case Path::KWW: {
      const double xa = std::pow(x, a);
      return a * std::pow(x, a - 2.0) * std::exp(-xa) * (1.0 - a + a * xa) / t2;
    }
  }
  return 0.0;
}

double pdf_g(const ModelSpec& spec, double xi, const PdfOptions& opt) {
  validate(spec);
  if (!(xi > 0.0) || !std::isfinite(xi)) throw DomainError("density needs xi > 0");
  const Path p = path_of(spec, opt.use_reductions);
  if (p == Path::Debye) throw DomainError("the Debye distribution is a point mass at xi = 1");
  if (p == Path::KWW) throw DomainError("no closed-form density for KWW");
  const double a = spec.alpha, b = spec.beta;
  switch (opt.form) {
    case PdfForm::Auto:
    case PdfForm::Trigonometric:
      return pdf_trig(p, a, b, xi);
    case PdfForm::SplitSign:
      return pdf_split_sign(path_of(spec, false), a, b, xi);
    case PdfForm::Series:
      if (p == Path::HN || p == Path::JWS || p == Path::CC)
        return pdf_series(jws_family(spec.kind), a, b, xi, opt.strategy);
      break;
    case PdfForm::Hypergeometric:
      if (p == Path::HN || p == Path::JWS || p == Path::CC)
        return pdf_hypergeometric(jws_family(spec.kind), a, b, xi, opt.strategy);
      break;
  }
  throw DomainError("requested density form is not available for this model");
}

AsymptoticValue asymptotic(const ModelSpec& spec, Quantity which, Regime regime, double t) {
  validate(spec);
  if (!(t > 0.0)) throw DomainError("asymptotics need t > 0");
  const double a = spec.alpha, b = spec.beta, tau = spec.tau, x = t / spec.tau;
  const bool response_q = which == Quantity::Response;
  if (spec.kind == ModelKind::KWW) {
    if (regime == Regime::Long) throw DomainError("KWW decays faster than any power");
    return {response_q ? a / tau * std::pow(x, a - 1.0) : 1.0 - std::pow(x, a), false};
  }
  if (!jws_family(spec.kind)) {
    if (regime == Regime::Short)
      return {response_q ? std::pow(x, a * b - 1.0) / (tau * std::tgamma(a * b))
                         : 1.0 - std::pow(x, a * b) / std::tgamma(1.0 + a * b),
              false};
    if (a == 1.0) throw DomainError("exponential decay has no power-law tail");
    return {response_q ? -b * std::pow(x, -1.0 - a) * rgamma(-a) / tau
                       : b * std::pow(x, -a) * rgamma(1.0 - a),
            false};
  }
  if (regime == Regime::Short)
    return {response_q ? b * std::pow(x, a - 1.0) / (tau * std::tgamma(a))
                       : 1.0 - b * std::pow(x, a) / std::tgamma(1.0 + a),
            false};
  // Long times: x^(-alpha beta) series; the leading coefficient vanishes when
  // alpha beta is a positive integer.
  const double lead = response_q ? -rgamma(-a * b) / tau : rgamma(1.0 - a * b);
  if (lead != 0.0)
    return {lead * std::pow(x, response_q ? -a * b - 1.0 : -a * b), false};
  const double a1 = a * (b + 1.0);
  const double next = response_q ? b * rgamma(-a1) / tau : -b * rgamma(1.0 - a1);
  if (next == 0.0) throw DomainError("exponential decay has no power-law tail");
  return {next * std::pow(x, response_q ? -a1 - 1.0 : -a1), true};
}

}  // namespace relaxkit
