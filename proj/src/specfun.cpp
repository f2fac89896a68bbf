#include "relaxkit/specfun.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "series.hpp"

namespace relaxkit {

namespace detail {

bool is_nonpositive_integer(double x) { return x <= 0.0 && x == std::floor(x); }

long double rgamma_ld(long double x) {
  if (x <= 0.0L && x == std::floor(x)) return 0.0L;
  if (x > 1700.0L) return 0.0L;
  return 1.0L / std::tgamma(x);
}

SeriesSum pfq_series(const std::vector<long double>& a,
                     const std::vector<long double>& b, long double x,
                     long double prefactor, const EvalStrategy& s) {
  SeriesSum out;
  long double term = prefactor;
  int small_run = 0;
  const long double tol = s.rel_tolerance;
  for (int r = 0; r < s.series_max_terms; ++r) {
    out.value += term;
    out.abs_sum += std::fabs(term);
    out.terms = r + 1;
    if (std::fabs(term) <= tol * std::fabs(out.value)) {
      if (++small_run >= 3) return out;
    } else {
      small_run = 0;
    }
    long double ratio = x / static_cast<long double>(r + 1);
    bool terminated = false;
    for (long double ai : a) {
      long double f = ai + r;
      if (f == 0.0L) terminated = true;
      ratio *= f;
    }
    if (terminated) return out;
    for (long double bi : b) {
      long double f = bi + r;
      if (f == 0.0L) throw DomainError("hyper_pfq: denominator parameter hits a pole");
      ratio /= f;
    }
    term *= ratio;
    if (term == 0.0L) return out;
    if (!std::isfinite(term)) throw ConvergenceFailure("hyper_pfq: term overflow");
  }
  throw ConvergenceFailure("hyper_pfq: no convergence within " +
                           std::to_string(s.series_max_terms) + " terms");
}

}  // namespace detail

void validate(const EvalStrategy& s) {
  if (s.series_max_terms < 1) throw DomainError("series_max_terms must be >= 1");
  if (!(s.rel_tolerance > 0.0 && s.rel_tolerance < 1.0))
    throw DomainError("rel_tolerance must lie in (0, 1)");
  if (!(s.crossover_magnitude > 0.0)) throw DomainError("crossover_magnitude must be > 0");
  if (s.contour_nodes < 16) throw DomainError("contour_nodes must be >= 16");
}

void validate(const RationalOrder& q) {
  if (q.l <= 0 || q.k <= 0) throw DomainError("rational order needs positive l and k");
  if (std::gcd(q.l, q.k) != 1) throw DomainError("rational order l/k must be in lowest terms");
  if (q.l > q.k) throw DomainError("rational order must satisfy l <= k");
}

double pochhammer(double c, int r) {
  if (r < 0) throw DomainError("pochhammer: r must be nonnegative");
  long double p = 1.0L;
  for (int i = 0; i < r; ++i) p *= static_cast<long double>(c) + i;
  return static_cast<double>(p);
}

double rgamma(double x) {
  if (detail::is_nonpositive_integer(x)) return 0.0;
  if (x > 171.0) return std::exp(-boost::math::lgamma(x));
  return 1.0 / boost::math::tgamma(x);
}

SignedLog lgamma_signed(double x) {
  if (detail::is_nonpositive_integer(x))
    return {std::numeric_limits<double>::infinity(), 0};
  int sign = 1;
  double v = boost::math::lgamma(x, &sign);
  return {v, sign};
}

double hyper_pfq(const std::vector<double>& numerators,
                 const std::vector<double>& denominators, double x,
                 const EvalStrategy& strategy) {
  validate(strategy);
  const std::size_t p = numerators.size();
  const std::size_t q = denominators.size();
  bool terminating = false;
  for (double a : numerators)
    if (detail::is_nonpositive_integer(a)) terminating = true;
  if (!terminating) {
    if (p > q + 1 && x != 0.0)
      throw DomainError("hyper_pfq: divergent series (p > q + 1)");
    if (p == q + 1 && std::fabs(x) >= 1.0)
      throw DomainError("hyper_pfq: |x| >= 1 outside the convergence disk");
  }
  std::vector<long double> a(numerators.begin(), numerators.end());
  std::vector<long double> b(denominators.begin(), denominators.end());
  return static_cast<double>(detail::pfq_series(a, b, x, 1.0L, strategy).value);
}

}  // namespace relaxkit
