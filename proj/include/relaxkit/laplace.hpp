#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <string>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "relaxkit/errors.hpp"

namespace relaxkit {

using cplx = std::complex<double>;
using mp_real = boost::multiprecision::cpp_bin_float_50;

struct LaplaceImage {
  std::function<cplx(cplx)> evaluator;
  double abscissa = 0.0;
  // Coefficient of a constant term of the image, i.e. of delta(t) in the
  // original. The evaluator must not include it.
  double singular_weight = 0.0;
  // Optional 50-digit evaluator on the real axis. Gaver-Stehfest uses it when
  // present; its alternating weights need more than double precision.
  std::function<mp_real(const mp_real&)> real_evaluator;
};

enum class InversionMethod { Talbot, GaverStehfest };

struct InversionConfig {
  InversionMethod method = InversionMethod::Talbot;
  int nodes = 32;  // Talbot nodes, or the Stehfest order
  bool cross_check = false;
};

// Stehfest order used for cross checks: 32 with a multiprecision evaluator,
// 16 otherwise.
int default_stehfest_order(const LaplaceImage& image);

void validate(const InversionConfig& cfg);

struct InversionDisagreement {
  double talbot = 0.0;
  double stehfest = 0.0;
  double rel_difference = 0.0;
  std::string message;
};

struct InversionResult {
  double value = 0.0;            // regular part f(t)
  double singular_weight = 0.0;  // reported, never folded into value
  std::optional<InversionDisagreement> disagreement;
};

InversionResult inverse_laplace(const LaplaceImage& image, double t,
                                const InversionConfig& cfg = {});

// Bare contour sum on the optimized cotangent contour; F must decay or grow
// at most algebraically in the left half plane.
double talbot_invert(const std::function<cplx(cplx)>& F, double t, int nodes = 32);

// Gaver-Stehfest with even order N; F sampled on the positive real axis.
double stehfest_invert(const std::function<double(double)>& F, double t, int order = 16);
double stehfest_invert(const std::function<mp_real(const mp_real&)>& F, double t,
                       int order = 32);

// int_0^inf exp(-z t) f(t) dt. tail_exponent p describes f(t) ~ C t^p at large t.
double forward_laplace(const std::function<double(double)>& f, double z,
                       double tail_exponent = 0.0, double rel_tol = 1e-12);

// int_0^inf h(xi) k(xi, t) dxi with a split at the kernel's mass concentration.
double efros_compose(const std::function<double(double)>& h,
                     const std::function<double(double, double)>& kernel,
                     double t);

// f(alpha; u, t) = t / (alpha u^(1+1/alpha)) Phi_alpha(t u^(-1/alpha)).
double subordination_kernel(double alpha, double u, double t);

}  // namespace relaxkit
