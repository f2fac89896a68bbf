#include <cmath>
#include <numbers>

#include "relaxkit/quadrature.hpp"
#include "relaxkit/specfun.hpp"

namespace relaxkit {

// Bromwich integral for exp(-z^alpha) deformed onto its steepest-descent path,
// on which the integrand is real and positive:
//   Phi(x) = alpha / ((1 - alpha) pi x) int_0^pi w e^{-w} dphi,  w = c A(phi),
//   c = x^(-alpha/(1-alpha)),
//   A = (sin(alpha phi)/sin phi)^(1/(1-alpha)) sin((1-alpha) phi) / sin(alpha phi).
double levy_stable_density(double alpha, double x) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("levy_stable_density needs 0 < alpha < 1");
  if (!(x > 0.0)) throw DomainError("levy_stable_density needs x > 0");
  if (!std::isfinite(x)) return 0.0;
  const double pi = std::numbers::pi;
  // Far tail: (1/pi) sum_k (-1)^(k+1) Gamma(alpha k + 1) / k! sin(pi alpha k) x^(-alpha k - 1),
  // with terms falling by at least x^-alpha <= 0.8.
  const double lx = std::log(x);
  if (alpha * lx >= std::log(1.25)) {
    double sum = 0.0;
    for (int k = 1; k < 200; ++k) {
      const double mag =
          std::exp(std::lgamma(alpha * k + 1.0) - std::lgamma(k + 1.0) - (alpha * k + 1.0) * lx);
      const double term = mag * std::sin(pi * alpha * k);
      sum += (k % 2 == 1) ? term : -term;
      if (mag <= 1e-17 * std::fabs(sum)) break;
    }
    return sum / pi;
  }
  const double q = 1.0 / (1.0 - alpha);
  const double logc = -alpha * q * std::log(x);

  auto integrand = [&](double phi, double rest) {
    // rest = pi - phi, accurate near the upper endpoint
    double logA;
    if (phi < 1e-8) {
      logA = q * std::log(alpha) + std::log((1.0 - alpha) / alpha);
    } else {
      const double s_phi = phi < 1.5 ? std::sin(phi) : std::sin(rest);
      logA = q * (std::log(std::sin(alpha * phi)) - std::log(s_phi)) +
             std::log(std::sin((1.0 - alpha) * phi)) - std::log(std::sin(alpha * phi));
    }
    const double logw = logc + logA;
    if (logw > 700.0) return 0.0;
    const double w = std::exp(logw);
    return w * std::exp(-w);
  };
  const double I = integrate_finite(integrand, 0.0, pi, 1e-13);
  return alpha * q / (pi * x) * I;
}

}  // namespace relaxkit
