#include "relaxkit/quadrature.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <vector>

#include "relaxkit/errors.hpp"

namespace relaxkit {

namespace {

boost::math::quadrature::tanh_sinh<double>& rule() {
  thread_local boost::math::quadrature::tanh_sinh<double> ts(12);
  return ts;
}

double checked(double q, double err, double l1, const char* where) {
  if (!std::isfinite(q) || !std::isfinite(err))
    throw QuadratureFailure(std::string(where) + ": non-finite result");
  if (err > 1e-5 * l1 && err > 1e-300)
    throw QuadratureFailure(std::string(where) + ": error estimate too large");
  return q;
}

struct Raw {
  double q = 0.0, err = 0.0, l1 = 0.0;
  Raw& operator+=(const Raw& o) {
    q += o.q;
    err += o.err;
    l1 += o.l1;
    return *this;
  }
};

// Mapped onto [-1, 1] here: the rule's error estimate is only reliable there.
// vc is the signed distance from v to the nearest endpoint.
Raw raw_finite(const std::function<double(double, double)>& f, double a, double b,
               double rel_tol) {
  Raw out;
  if (!(b > a)) return out;
  const double half = 0.5 * (b - a);
  auto g = [&](double v, double vc) {
    double x, r;
    if (vc < 0.0) {
      x = a + half * -vc;
      r = b - x;
    } else if (vc > 0.0) {
      r = half * vc;
      x = b - r;
    } else {
      x = a + half * (v + 1.0);
      r = b - x;
    }
    double y = f(x, r);
    return std::isfinite(y) ? y : 0.0;
  };
  out.q = half * rule().integrate(g, -1.0, 1.0, rel_tol, &out.err, &out.l1);
  out.err *= half;
  out.l1 *= half;
  return out;
}

Raw raw_to_infinity(const std::function<double(double)>& f, double a, double rel_tol) {
  auto g = [&](double v, double) {
    if (v <= 0.0) return 0.0;
    double x = a + (1.0 - v) / v;
    double y = f(x) / (v * v);
    return std::isfinite(y) ? y : 0.0;
  };
  return raw_finite(g, 0.0, 1.0, rel_tol);
}

}  // namespace

double integrate_finite(const std::function<double(double, double)>& f, double a,
                        double b, double rel_tol) {
  Raw r = raw_finite(f, a, b, rel_tol);
  return checked(r.q, r.err, r.l1, "integrate_finite");
}

double integrate_finite(const std::function<double(double)>& f, double a, double b,
                        double rel_tol) {
  return integrate_finite([&](double x, double) { return f(x); }, a, b, rel_tol);
}

double integrate_to_infinity(const std::function<double(double)>& f, double a,
                             double rel_tol) {
  Raw r = raw_to_infinity(f, a, rel_tol);
  return checked(r.q, r.err, r.l1, "integrate_to_infinity");
}

double integrate_panels(const std::function<double(double)>& f, const std::vector<double>& cuts,
                        double rel_tol) {
  auto g = [&](double x, double) { return f(x); };
  Raw total;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    total += raw_finite(g, cuts[i], cuts[i + 1], rel_tol);
  return checked(total.q, total.err, total.l1, "integrate_panels");
}

// Panels are checked together: a panel holding only round-off has no
// meaningful relative error of its own.
double integrate_half_line(const std::function<double(double)>& f, double pivot,
                           double rel_tol) {
  if (!(pivot > 0.0)) throw QuadratureFailure("integrate_half_line: pivot must be positive");
  static const double inner[] = {0.0, 1e-8, 1e-6, 1e-4, 1e-2, 1e-1, 1.0};
  static const double outer[] = {1.0, 10.0, 1e2, 1e4};
  auto g = [&](double x, double) { return f(x); };
  Raw total;
  for (std::size_t i = 0; i + 1 < std::size(inner); ++i)
    total += raw_finite(g, inner[i] * pivot, inner[i + 1] * pivot, rel_tol);
  for (std::size_t i = 0; i + 1 < std::size(outer); ++i)
    total += raw_finite(g, outer[i] * pivot, outer[i + 1] * pivot, rel_tol);
  total += raw_to_infinity(f, outer[std::size(outer) - 1] * pivot, rel_tol);
  return checked(total.q, total.err, total.l1, "integrate_half_line");
}

}  // namespace relaxkit
