#pragma once

#include <complex>
#include <string>

#include "relaxkit/laplace.hpp"
#include "relaxkit/specfun.hpp"

namespace relaxkit {

enum class ModelKind { Debye, CC, CD, MCD, HN, JWS, KWW };

// For KWW, alpha and tau play the roles of the stretching exponent and its own
// time scale; beta is unused.
struct ModelSpec {
  ModelKind kind = ModelKind::Debye;
  double alpha = 1.0;
  double beta = 1.0;
  double tau = 1.0;
  bool strict_experimental = false;  // narrows beta to (0, 1]
  bool override_regime = false;      // admits beta > 1/alpha (negative lobes)
};

struct PermittivityScale {
  double eps_static = 1.0;
  double eps_inf = 0.0;
};

// Net weight of delta(t) plus the regular part of phi at the requested time.
struct TimeResponse {
  double singular_weight = 0.0;
  double regular = 0.0;
};

struct EvalOptions {
  EvalStrategy strategy{};
  // Route Debye/CC/CD/MCD parameter points of HN and JWS to their closed forms.
  bool use_reductions = true;
};

std::string to_string(ModelKind kind);
ModelKind parse_model_kind(const std::string& name);
// Number of shape parameters (alpha, beta) the kind actually varies.
int shape_parameter_count(ModelKind kind);

// Returns a copy with the kind-specific pinned parameters set to 1.
ModelSpec pinned(ModelSpec spec);
void validate(const ModelSpec& spec);
void validate(const PermittivityScale& scale);

// phi-hat(i omega tau).
std::complex<double> spectral(const ModelSpec& spec, double omega_tau);
// phi-hat(z) for complex z (units of 1/time) with Re z > 0.
std::complex<double> spectral_image(const ModelSpec& spec, std::complex<double> z);
// The same image as a LaplaceImage, including a 50-digit real-axis evaluator.
LaplaceImage response_image(const ModelSpec& spec);

enum class PermittivityRoute { Auto, Trigonometric, Spectral };

struct Permittivity {
  double eps_re = 0.0;
  double eps_im = 0.0;  // eps* = eps_re - i eps_im
};

Permittivity permittivity(const ModelSpec& spec, const PermittivityScale& scale,
                          double omega, PermittivityRoute route = PermittivityRoute::Auto);

// theta_alpha(y): angle of (y^-alpha + cos(pi alpha), sin(pi alpha)), in (0, pi alpha).
double theta(double alpha, double y);

TimeResponse response(const ModelSpec& spec, double t, const EvalOptions& opt = {});
double relaxation(const ModelSpec& spec, double t, const EvalOptions& opt = {});
// order 1 or 2.
double relaxation_derivative(const ModelSpec& spec, double t, int order,
                             const EvalOptions& opt = {});

enum class PdfForm { Auto, Trigonometric, Series, Hypergeometric, SplitSign };

struct PdfOptions {
  PdfForm form = PdfForm::Auto;
  EvalStrategy strategy{};
  bool use_reductions = true;
};

// g(xi) with n(t) = int_0^inf exp(-t xi / tau) g(xi) dxi.
double pdf_g(const ModelSpec& spec, double xi, const PdfOptions& opt = {});

enum class Quantity { Response, Relaxation };
enum class Regime { Short, Long };

struct AsymptoticValue {
  double value = 0.0;
  bool next_order = false;  // leading coefficient vanished; next term returned
};

AsymptoticValue asymptotic(const ModelSpec& spec, Quantity which, Regime regime, double t);

}  // namespace relaxkit
