#pragma once

#include <functional>
#include <vector>

namespace relaxkit {

// Thin wrappers over the Boost.Math double-exponential rules. All of them throw
// QuadratureFailure when the estimated error is not finite.

// f(x, r) receives r = b - x computed without cancellation near b, which keeps
// endpoint singularities such as (t - x)^(-a) accurate.
double integrate_finite(const std::function<double(double, double)>& f, double a,
                        double b, double rel_tol = 1e-12);

double integrate_finite(const std::function<double(double)>& f, double a, double b,
                        double rel_tol = 1e-12);

// int_a^inf f(x) dx via x = a + (1 - v)/v on (0, 1].
double integrate_to_infinity(const std::function<double(double)>& f, double a,
                             double rel_tol = 1e-12);

// Sum over consecutive panels [cuts[i], cuts[i+1]]; the error check applies to
// the total, so panels holding only round-off do not fail on their own.
double integrate_panels(const std::function<double(double)>& f, const std::vector<double>& cuts,
                        double rel_tol = 1e-12);

// int_0^inf f(x) dx split at `pivot` (a scale where f concentrates).
double integrate_half_line(const std::function<double(double)>& f, double pivot,
                           double rel_tol = 1e-12);

}  // namespace relaxkit
