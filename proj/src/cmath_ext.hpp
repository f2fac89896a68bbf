#pragma once

#include <cmath>
#include <complex>

namespace relaxkit::detail {

// log(1 + w) and exp(u) - 1 without cancellation for small arguments.
inline std::complex<double> clog1p(std::complex<double> w) {
  const double re = 0.5 * std::log1p(2.0 * w.real() + std::norm(w));
  return {re, std::atan2(w.imag(), 1.0 + w.real())};
}

inline std::complex<double> cexpm1(std::complex<double> u) {
  const double c = std::cos(u.imag()), s = std::sin(u.imag()), h = std::sin(0.5 * u.imag());
  return {std::expm1(u.real()) * c - 2.0 * h * h, std::exp(u.real()) * s};
}

inline std::complex<double> cpow(std::complex<double> u, double a) {
  return std::exp(a * std::log(u));
}

}  // namespace relaxkit::detail
