#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include "relaxkit/laplace.hpp"
#include "relaxkit/specfun.hpp"
#include "series.hpp"

namespace relaxkit {

namespace {

using detail::rgamma_ld;

constexpr long double kLdEps = std::numeric_limits<long double>::epsilon();

struct Partial {
  long double value = 0.0L;
  long double abs_sum = 0.0L;
  bool converged = false;
};

void check_params(const PrabhakarParams& p) {
  if (!(p.alpha > 0.0) || !std::isfinite(p.alpha))
    throw DomainError("prabhakar: alpha must be positive");
  if (!std::isfinite(p.mu) || !std::isfinite(p.nu))
    throw DomainError("prabhakar: mu and nu must be finite");
}

// sum_r (nu)_r (-x)^r / (r! Gamma(alpha r + mu))
Partial power_series(const PrabhakarParams& p, double x, const EvalStrategy& s) {
  Partial out;
  const long double a = p.alpha, mu = p.mu, nu = p.nu, mx = -static_cast<long double>(x);
  long double c = 1.0L;
  int small_run = 0;
  for (int r = 0; r < s.series_max_terms; ++r) {
    long double term = c * rgamma_ld(a * r + mu);
    out.value += term;
    out.abs_sum += std::fabs(term);
    if (std::fabs(term) <= s.rel_tolerance * std::fabs(out.value)) {
      if (++small_run >= 3) {
        out.converged = true;
        return out;
      }
    } else {
      small_run = 0;
    }
    c *= (nu + r) * mx / (r + 1);
    if (c == 0.0L) {
      out.converged = true;
      return out;
    }
    if (!std::isfinite(c)) return out;
  }
  return out;
}

// x^(-nu) sum_r (-1)^r (nu)_r / r! x^(-r) / Gamma(mu - alpha(nu + r)), truncated
// before the divergent tail sets in.
Partial asymptotic_series(const PrabhakarParams& p, double x, const EvalStrategy& s) {
  Partial out;
  const long double a = p.alpha, mu = p.mu, nu = p.nu, ix = 1.0L / x;
  long double c = 1.0L;
  long double prev = -1.0L;
  int small_run = 0;
  for (int r = 0; r < s.series_max_terms; ++r) {
    long double term = c * rgamma_ld(mu - a * (nu + r));
    long double mag = std::fabs(term);
    if (r >= 3 && mag > 0.0L && prev > 0.0L && mag > prev) return out;
    out.value += term;
    out.abs_sum += mag;
    if (mag <= s.rel_tolerance * std::fabs(out.value)) {
      if (++small_run >= 3) {
        out.converged = true;
        break;
      }
    } else {
      small_run = 0;
    }
    if (mag > 0.0L) prev = mag;
    c *= -(nu + r) * ix / (r + 1);
    if (c == 0.0L) {
      out.converged = true;
      break;
    }
  }
  if (out.converged) {
    long double scale = std::pow(static_cast<long double>(x), -nu);
    out.value *= scale;
    out.abs_sum *= scale;
  }
  return out;
}

// alpha = 1: Kummer's transformation turns the alternating series into
// exp(-x) sum_r (mu - nu)_r x^r / (r! Gamma(mu + r)).
double kummer_path(const PrabhakarParams& p, double x, const EvalStrategy& s) {
  const double d = p.mu - p.nu;
  const bool terminating = detail::is_nonpositive_integer(d);
  if (terminating || x <= 600.0) {
    long double sum = 0.0L, c = 1.0L;
    int small_run = 0;
    bool ok = false;
    for (int r = 0; r < std::max(s.series_max_terms, 4000); ++r) {
      long double term = c * rgamma_ld(static_cast<long double>(p.mu) + r);
      sum += term;
      if (std::fabs(term) <= 1e-19L * std::fabs(sum)) {
        if (++small_run >= 3) {
          ok = true;
          break;
        }
      } else {
        small_run = 0;
      }
      c *= (static_cast<long double>(d) + r) * static_cast<long double>(x) / (r + 1);
      if (c == 0.0L) {
        ok = true;
        break;
      }
    }
    if (!ok) throw ConvergenceFailure("prabhakar: Kummer series did not converge");
    return static_cast<double>(std::exp(-static_cast<long double>(x)) * sum);
  }
  Partial as = asymptotic_series(p, x, s);
  if (!as.converged) throw ConvergenceFailure("prabhakar: asymptotic series failed for alpha = 1");
  return static_cast<double>(as.value);
}

double contour_path(const PrabhakarParams& p, double x, const EvalStrategy& s) {
  if (p.alpha > 1.0)
    throw DomainError("prabhakar: contour inversion supports 0 < alpha <= 1");
  const double a = p.alpha, mu = p.mu, nu = p.nu;
  const double t = std::pow(x, 1.0 / a);
  // Subtract the non-decaying head of the large-s expansion of the image
  // and restore it analytically.
  int R = 0;
  while (mu + a * R <= 0.0) ++R;
  std::vector<double> coef(R);
  double c = 1.0, head = 0.0;
  for (int r = 0; r < R; ++r) {
    coef[r] = c;
    head += c * std::pow(x, r) * rgamma(mu + a * r);
    c *= -(nu + r) / (r + 1);
  }
  auto F = [&](cplx z) {
    cplx lz = std::log(z);
    cplx za = std::exp(a * lz);
    cplx v = std::exp((a * nu - mu) * lz - nu * std::log(1.0 + za));
    for (int r = 0; r < R; ++r) v -= coef[r] * std::exp(-(mu + a * r) * lz);
    return v;
  };
  double reg = talbot_invert(F, t, s.contour_nodes);
  return std::pow(t, 1.0 - mu) * reg + head;
}

}  // namespace

std::optional<RationalOrder> rational_order(double alpha) {
  for (int k = 1; k <= 24; ++k) {
    double l = std::round(alpha * k);
    if (l >= 1 && std::fabs(l / k - alpha) <= 1e-14) {
      RationalOrder q{static_cast<int>(l), k};
      if (std::gcd(q.l, q.k) == 1) return q;
    }
  }
  return std::nullopt;
}

double prabhakar(const PrabhakarParams& p, double x, const EvalStrategy& s) {
  check_params(p);
  validate(s);
  if (!(x >= 0.0) || !std::isfinite(x))
    throw DomainError("prabhakar: argument must be a finite nonnegative number");
  if (x == 0.0) return rgamma(p.mu);

  switch (s.kind) {
    case StrategyKind::PowerSeries: {
      Partial ps = power_series(p, x, s);
      if (!ps.converged) throw ConvergenceFailure("prabhakar: power series did not converge");
      return static_cast<double>(ps.value);
    }
    case StrategyKind::AsymptoticSeries: {
      Partial as = asymptotic_series(p, x, s);
      if (!as.converged) throw ConvergenceFailure("prabhakar: asymptotic series did not converge");
      return static_cast<double>(as.value);
    }
    case StrategyKind::ContourInversion:
      return contour_path(p, x, s);
    case StrategyKind::HypergeometricReduction: {
      auto q = rational_order(p.alpha);
      if (!q) throw DomainError("prabhakar: alpha is not a rational l/k with small k");
      return prabhakar_rational(*q, p.mu, p.nu, x, s);
    }
    case StrategyKind::AutoSwitch:
      break;
  }

  if (p.alpha == 1.0) return kummer_path(p, x, s);
  const double t = std::pow(x, 1.0 / p.alpha);
  if (t <= s.crossover_magnitude || p.alpha > 1.0) {
    Partial ps = power_series(p, x, s);
    bool clean = ps.converged &&
                 ps.abs_sum * kLdEps <= 1e-16L * std::fabs(ps.value) * 1e3L;
    if (clean || (ps.converged && ps.value == 0.0L && ps.abs_sum == 0.0L))
      return static_cast<double>(ps.value);
    if (p.alpha > 1.0) throw DomainError("prabhakar: series unreliable and alpha > 1");
  } else {
    Partial as = asymptotic_series(p, x, s);
    if (as.converged) return static_cast<double>(as.value);
  }
  return contour_path(p, x, s);
}

double prabhakar_rational(const RationalOrder& q, double mu, double nu, double x,
                          const EvalStrategy& s) {
  validate(q);
  validate(s);
  if (!(x >= 0.0) || !std::isfinite(x))
    throw DomainError("prabhakar_rational: argument must be nonnegative");
  const int l = q.l, k = q.k;
  const long double alpha = static_cast<long double>(l) / k;
  if (x == 0.0) return rgamma(mu);
  const long double z = -static_cast<long double>(x);
  const long double X = std::pow(z, k) / std::pow(static_cast<long double>(l), l);

  long double total = 0.0L, abs_total = 0.0L;
  for (int j = 0; j < k; ++j) {
    const long double b = mu + alpha * j;
    // First index r0 of the j-th subsequence n = k r + j with a nonzero term.
    int r0 = 0;
    while (b + static_cast<long double>(l) * r0 <= 0.0L &&
           std::floor(b + static_cast<long double>(l) * r0) == b + static_cast<long double>(l) * r0)
      ++r0;
    const int n0 = k * r0 + j;
    // Leading term (nu)_n0 z^n0 / (n0! Gamma(mu + alpha n0)).
    long double lead = rgamma_ld(static_cast<long double>(mu) + alpha * n0);
    for (int i = 0; i < n0; ++i) lead *= (static_cast<long double>(nu) + i) * z / (i + 1);
    if (lead == 0.0L) continue;
    std::vector<long double> num{1.0L}, den;
    for (int i = 0; i < k; ++i) num.push_back((nu + j + i) / k + r0);
    for (int i = 0; i < k; ++i) den.push_back((1.0L + j + i) / k + r0);
    for (int i = 0; i < l; ++i) den.push_back((b + i) / l + r0);
    detail::SeriesSum part = detail::pfq_series(num, den, X, lead, s);
    total += part.value;
    abs_total += part.abs_sum;
  }
  if (abs_total * kLdEps > 1e-9L * std::fabs(total))
    throw DomainError("prabhakar_rational: argument outside the cancellation safeguard");
  return static_cast<double>(total);
}

double prabhakar_scaled(const PrabhakarParams& p, double lambda, double x,
                        const EvalStrategy& s) {
  if (lambda > 0.0) throw DomainError("prabhakar: only nonpositive scale factors are supported");
  if (!(x > 0.0)) throw DomainError("prabhakar_scaled: x must be positive");
  return std::pow(x, p.mu - 1.0) * prabhakar(p, -lambda * std::pow(x, p.alpha), s);
}

double prabhakar_derivative(const PrabhakarParams& p, double lambda, double x,
                            const EvalStrategy& s) {
  PrabhakarParams shifted{p.alpha, p.mu - 1.0, p.nu};
  return prabhakar_scaled(shifted, lambda, x, s);
}

double prabhakar_small_x_leading(const PrabhakarParams& p, double x) {
  double lead = rgamma(p.mu);
  if (lead != 0.0) return lead;
  return -p.nu * x * rgamma(p.alpha + p.mu);
}

double prabhakar_large_x_leading(const PrabhakarParams& p, double x) {
  double lead = std::pow(x, -p.nu) * rgamma(p.mu - p.alpha * p.nu);
  if (lead != 0.0) return lead;
  return -p.nu * std::pow(x, -p.nu - 1.0) * rgamma(p.mu - p.alpha * (p.nu + 1.0));
}

}  // namespace relaxkit
