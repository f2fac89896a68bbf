#pragma once

#include <optional>
#include <vector>

#include "relaxkit/errors.hpp"

namespace relaxkit {

// Indices of E_{alpha,mu}^{nu}(z) = sum_r (nu)_r z^r / (r! Gamma(alpha r + mu)).
struct PrabhakarParams {
  double alpha = 1.0;
  double mu = 1.0;
  double nu = 1.0;
};

enum class StrategyKind {
  AutoSwitch,
  PowerSeries,
  AsymptoticSeries,
  ContourInversion,
  HypergeometricReduction
};

struct EvalStrategy {
  StrategyKind kind = StrategyKind::AutoSwitch;
  int series_max_terms = 2000;
  double rel_tolerance = 1e-15;
  // Applied to x^(1/alpha), the natural time variable t/tau when x = (t/tau)^alpha.
  double crossover_magnitude = 5.0;
  // Number of Talbot nodes used by the contour path.
  int contour_nodes = 32;
};

void validate(const EvalStrategy& s);

// alpha = l/k in lowest terms.
struct RationalOrder {
  int l = 1;
  int k = 1;
};

void validate(const RationalOrder& q);

// l/k with k <= 24 when alpha matches it to 1e-14.
std::optional<RationalOrder> rational_order(double alpha);

// Rising factorial (c)_r as a direct product.
double pochhammer(double c, int r);

// 1/Gamma(x); zero at the poles of Gamma.
double rgamma(double x);

struct SignedLog {
  double log_abs;
  int sign;  // -1, 0 or +1; 0 means the value is exactly zero
};

// log|Gamma(x)| with the sign of Gamma(x); sign 0 marks a pole.
SignedLog lgamma_signed(double x);

// pFq(a; b; x) by partial sums with the three-small-terms stopping rule.
double hyper_pfq(const std::vector<double>& numerators,
                 const std::vector<double>& denominators, double x,
                 const EvalStrategy& strategy = {});

// E_{alpha,mu}^{nu}(-x), x >= 0.
double prabhakar(const PrabhakarParams& p, double x,
                 const EvalStrategy& strategy = {});

// Same function through the finite sum of k generalized hypergeometric series
// for alpha = l/k.
double prabhakar_rational(const RationalOrder& q, double mu, double nu,
                          double x, const EvalStrategy& strategy = {});

// d/dx [x^(mu-1) E_{alpha,mu}^{nu}(lambda x^alpha)] = x^(mu-2) E_{alpha,mu-1}^{nu}(lambda x^alpha),
// lambda <= 0.
double prabhakar_derivative(const PrabhakarParams& p, double lambda, double x,
                            const EvalStrategy& strategy = {});

// x^(mu-1) E_{alpha,mu}^{nu}(lambda x^alpha), lambda <= 0.
double prabhakar_scaled(const PrabhakarParams& p, double lambda, double x,
                        const EvalStrategy& strategy = {});

// One-sided Levy stable density with Laplace transform exp(-z^alpha).
double levy_stable_density(double alpha, double x);

// Leading terms of E_{alpha,mu}^{nu}(-x) for small and large x.
double prabhakar_small_x_leading(const PrabhakarParams& p, double x);
double prabhakar_large_x_leading(const PrabhakarParams& p, double x);

}  // namespace relaxkit
