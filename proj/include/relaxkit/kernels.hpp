#pragma once

#include <vector>

#include "relaxkit/laplace.hpp"
#include "relaxkit/models.hpp"

namespace relaxkit {

struct KernelConfig {
  ModelSpec spec;
  double rate_B = 1.0;
  int series_terms = 4000;  // cap for the time-domain kernel series
};

void validate(const KernelConfig& cfg);

// Kinds with a memory-kernel pair: Debye, CC, CD, MCD, HN, JWS.
bool has_kernels(ModelKind kind);

double memory_M_hat(const KernelConfig& cfg, double s);
double memory_k_hat(const KernelConfig& cfg, double s);
// Psi-hat(s) = 1 / M-hat(s) = B (1 - phi-hat) / phi-hat.
double characteristic_exponent(const KernelConfig& cfg, double s);

std::complex<double> memory_M_image(const KernelConfig& cfg, std::complex<double> z);
std::complex<double> memory_k_image(const KernelConfig& cfg, std::complex<double> z);
std::complex<double> exponent_image(const KernelConfig& cfg, std::complex<double> z);

struct KernelValue {
  double regular = 0.0;
  double singular_weight = 0.0;  // coefficient of delta(t)
  double tail_bound = 0.0;       // estimate of the dropped series tail
  bool truncated = false;        // tail_bound above the requested accuracy
};

KernelValue memory_M_time(const KernelConfig& cfg, double t);
KernelValue memory_k_time(const KernelConfig& cfg, double t);

// Residual of the evolution equation at t, scaled by 1/B.
//   Debye, CC, CD, HN: int_0^t k(t - xi) n'(xi) dxi + B n(t)
//   MCD, JWS:          n(t) + B int_0^t M(t - xi) n(xi) dxi - 1
double evolution_residual_at(const KernelConfig& cfg, double t);

// Maximum absolute residual over a sorted positive grid.
double evolution_residual(const KernelConfig& cfg, const std::vector<double>& t_grid);

// Debye, CC, CD, HN with alpha beta < 1. The Caputo-type operator applied to n
// against d/dt int_0^t K(t - xi) n(xi) dxi - K(t) n(0+), with
// K(u) = u^(-alpha beta) E^{-beta}_{alpha,1-alpha beta}(-(u/tau)^alpha).
struct OperatorPair {
  double caputo = 0.0;
  double riemann_liouville = 0.0;  // already shifted by -K(t) n(0+)
};

OperatorPair operator_relation(const ModelSpec& spec, double t);

// Relaxation function rebuilt by subordination.
//   DebyeParent: int_0^inf exp(-B xi) f_Psi(xi, t) dxi, f_Psi by contour inversion
//   of Psi-hat(z) exp(-xi Psi-hat(z)) / z.
//   StableParent: int_0^inf n_parent(u) f(alpha; u, t) du with the CD (HN, CC) or
//   MCD (JWS) law of index beta on the time scale tau^alpha.
enum class Parent { DebyeParent, StableParent };

double subordinated_relaxation(const KernelConfig& cfg, Parent parent, double t);

}  // namespace relaxkit
