#include <cmath>
#include <numbers>

#include "doctest.h"
#include "relaxkit/laplace.hpp"
#include "relaxkit/quadrature.hpp"

using namespace relaxkit;

TEST_CASE("talbot on elementary images") {
  const double pi = std::numbers::pi;
  for (double t : {0.05, 0.5, 1.0, 4.0, 20.0}) {
    CAPTURE(t);
    CHECK(talbot_invert([](cplx s) { return 1.0 / (s + 1.0); }, t) ==
          doctest::Approx(std::exp(-t)).epsilon(1e-12));
    CHECK(talbot_invert([](cplx s) { return 1.0 / std::sqrt(s); }, t) ==
          doctest::Approx(1.0 / std::sqrt(pi * t)).epsilon(1e-12));
    const double a = 0.3;
    CHECK(talbot_invert([a](cplx s) { return std::pow(s, -a); }, t) ==
          doctest::Approx(std::pow(t, a - 1.0) / std::tgamma(a)).epsilon(1e-11));
  }
}

TEST_CASE("gaver-stehfest in double and 50 digits") {
  for (double t : {0.5, 1.0, 3.0}) {
    const double d = stehfest_invert([](double s) { return 1.0 / (s + 1.0); }, t, 14);
    CHECK(d == doctest::Approx(std::exp(-t)).epsilon(1e-3));
    std::function<mp_real(const mp_real&)> F = [](const mp_real& s) { return 1 / (s + 1); };
    CHECK(stehfest_invert(F, t, 32) == doctest::Approx(std::exp(-t)).epsilon(1e-9));
  }
  CHECK_THROWS_AS(stehfest_invert([](double s) { return 1.0 / s; }, 1.0, 7), DomainError);
}

TEST_CASE("inverse_laplace reports singular weight and cross-checks") {
  LaplaceImage img;
  img.evaluator = [](cplx s) { return 1.0 / (s + 2.0); };
  img.real_evaluator = [](const mp_real& s) { return mp_real(1) / (s + 2); };
  img.singular_weight = 0.25;
  InversionConfig cfg;
  cfg.cross_check = true;
  const InversionResult r = inverse_laplace(img, 1.0, cfg);
  CHECK(r.value == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
  CHECK(r.singular_weight == 0.25);
  CHECK_FALSE(r.disagreement.has_value());

  // A wrong real-axis evaluator is caught.
  img.real_evaluator = [](const mp_real& s) { return mp_real(1) / (s + 3); };
  CHECK(inverse_laplace(img, 1.0, cfg).disagreement.has_value());

  // growing original
  img.evaluator = [](cplx s) { return 1.0 / (s - 1.0); };
  img.real_evaluator = nullptr;
  img.abscissa = 1.0;
  img.singular_weight = 0.0;
  CHECK(inverse_laplace(img, 2.0).value == doctest::Approx(std::exp(2.0)).epsilon(1e-10));

  cfg.nodes = 15;
  CHECK_THROWS_AS(inverse_laplace(img, 1.0, cfg), DomainError);
}

TEST_CASE("forward transform") {
  for (double z : {0.01, 0.5, 2.0, 100.0}) {
    CAPTURE(z);
    CHECK(forward_laplace([](double t) { return std::exp(-t); }, z, 0.0) ==
          doctest::Approx(1.0 / (z + 1.0)).epsilon(1e-11));
    CHECK(forward_laplace([](double t) { return 1.0 / std::sqrt(t); }, z, -0.5) ==
          doctest::Approx(std::sqrt(std::numbers::pi / z)).epsilon(1e-9));
  }
}

TEST_CASE("subordination kernel") {
  const double pi = std::numbers::pi;
  // alpha = 1/2: exp(-u^2 / (4t)) / sqrt(pi t)
  for (double t : {0.1, 1.0, 7.0})
    for (double u : {0.01, 0.3, 1.0, 2.0, 6.0}) {
      CAPTURE(t); CAPTURE(u);
      CHECK(subordination_kernel(0.5, u, t) ==
            doctest::Approx(std::exp(-u * u / (4.0 * t)) / std::sqrt(pi * t)).epsilon(1e-9));
    }
  for (double a : {0.3, 0.6, 0.85}) {
    const double mass =
        integrate_half_line([a](double u) { return u > 0 ? subordination_kernel(a, u, 1.0) : 0.0; },
                            1.0, 1e-10);
    CAPTURE(a);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-7));
  }
}

TEST_CASE("efros composition with an exponential kernel") {
  // int_0^inf exp(-xi) xi exp(-xi t) dxi = 1 / (1 + t)^2
  auto h = [](double xi) { return xi * std::exp(-xi); };
  auto k = [](double xi, double t) { return std::exp(-xi * t); };
  for (double t : {0.1, 1.0, 5.0})
    CHECK(efros_compose(h, k, t) == doctest::Approx(1.0 / ((1 + t) * (1 + t))).epsilon(1e-10));
}
