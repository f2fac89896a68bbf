#include <cmath>

#include "doctest.h"
#include "relaxkit/kernels.hpp"

using namespace relaxkit;

namespace {
KernelConfig cfg(ModelKind k, double a, double b, double B = 1.0, double tau = 1.0) {
  KernelConfig c;
  c.spec.kind = k;
  c.spec.alpha = a;
  c.spec.beta = b;
  c.spec.tau = tau;
  c.rate_B = B;
  return c;
}
}  // namespace

TEST_CASE("Laplace-domain kernels are Sonine pairs") {
  for (auto c : {cfg(ModelKind::Debye, 1, 1, 2.0), cfg(ModelKind::CC, 0.4, 1),
                 cfg(ModelKind::CD, 1, 0.3), cfg(ModelKind::MCD, 1, 0.7, 0.5),
                 cfg(ModelKind::HN, 0.8, 0.6, 3.0, 2.0), cfg(ModelKind::JWS, 0.5, 1.5)}) {
    for (double s : {1e-3, 0.1, 1.0, 10.0, 1e3}) {
      CAPTURE(to_string(c.spec.kind));
      CAPTURE(s);
      CHECK(s * memory_M_hat(c, s) * memory_k_hat(c, s) == doctest::Approx(1.0).epsilon(1e-13));
      CHECK(characteristic_exponent(c, s) * memory_M_hat(c, s) == doctest::Approx(1.0).epsilon(1e-13));
    }
  }
}

TEST_CASE("Cole-Cole kernels in the time domain") {
  const double a = 0.6, B = 2.0, tau = 1.5;
  const KernelConfig c = cfg(ModelKind::CC, a, 1, B, tau);
  for (double t : {0.01, 0.3, 2.0, 10.0}) {
    const KernelValue k = memory_k_time(c, t);
    const KernelValue M = memory_M_time(c, t);
    CAPTURE(t);
    CHECK(k.regular ==
          doctest::Approx(B * std::pow(tau, a) * std::pow(t, -a) / std::tgamma(1 - a)).epsilon(1e-12));
    CHECK(M.regular ==
          doctest::Approx(std::pow(t, a - 1) / (B * std::pow(tau, a) * std::tgamma(a))).epsilon(1e-12));
    CHECK_FALSE(k.truncated);
  }
}

TEST_CASE("Debye kernels are a constant and a delta") {
  const KernelConfig c = cfg(ModelKind::Debye, 1, 1, 2.0, 0.5);
  const KernelValue M = memory_M_time(c, 1.3);
  CHECK(M.regular == doctest::Approx(1.0 / (2.0 * 0.5)));
  CHECK(M.singular_weight == 0.0);
}

TEST_CASE("evolution equation residuals") {
  const std::vector<double> grid = {0.1, 0.5, 1.0, 2.0, 5.0};
  for (auto c : {cfg(ModelKind::HN, 0.7, 0.5), cfg(ModelKind::CD, 1, 0.4, 2.0),
                 cfg(ModelKind::JWS, 0.6, 0.8), cfg(ModelKind::MCD, 1, 0.5, 3.0)}) {
    CAPTURE(to_string(c.spec.kind));
    CHECK(evolution_residual(c, grid) < 1e-4);
  }
}

TEST_CASE("the rate scales k up and M down") {
  const KernelConfig c1 = cfg(ModelKind::HN, 0.5, 0.5, 1.0);
  const KernelConfig c3 = cfg(ModelKind::HN, 0.5, 0.5, 3.0);
  for (double t : {0.2, 1.0, 4.0}) {
    CHECK(memory_k_time(c3, t).regular == doctest::Approx(3.0 * memory_k_time(c1, t).regular).epsilon(1e-12));
    CHECK(memory_M_time(c3, t).regular == doctest::Approx(memory_M_time(c1, t).regular / 3.0).epsilon(1e-12));
  }
}

TEST_CASE("Caputo and Riemann-Liouville forms agree") {
  ModelSpec s;
  s.kind = ModelKind::HN;
  s.alpha = 0.6;
  s.beta = 0.5;
  for (double t : {0.3, 1.0, 3.0}) {
    const OperatorPair p = operator_relation(s, t);
    CHECK(p.caputo == doctest::Approx(p.riemann_liouville).epsilon(1e-4));
  }
}

TEST_CASE("subordination rebuilds the relaxation function") {
  const KernelConfig c = cfg(ModelKind::HN, 0.7, 0.5, 2.0);
  for (double t : {0.5, 2.0}) {
    const double n = relaxation(c.spec, t);
    CHECK(subordinated_relaxation(c, Parent::StableParent, t) == doctest::Approx(n).epsilon(1e-6));
    CHECK(subordinated_relaxation(c, Parent::DebyeParent, t) == doctest::Approx(n).epsilon(1e-6));
  }
}

TEST_CASE("kernel availability") {
  CHECK_FALSE(has_kernels(ModelKind::KWW));
  CHECK(has_kernels(ModelKind::JWS));
  CHECK_THROWS_AS(memory_M_hat(cfg(ModelKind::KWW, 0.5, 1), 1.0), DomainError);
  CHECK_THROWS_AS(validate(cfg(ModelKind::HN, 0.5, 0.5, -1.0)), DomainError);
}
