#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/hypergeometric_1F1.hpp>

#include "doctest.h"
#include "relaxkit/models.hpp"

using namespace relaxkit;
using cd = std::complex<double>;

namespace {
ModelSpec make(ModelKind k, double a, double b, double tau = 1.0) {
  ModelSpec s;
  s.kind = k;
  s.alpha = a;
  s.beta = b;
  s.tau = tau;
  return s;
}
double cabs_rel(cd a, cd b) { return std::abs(a - b) / std::abs(b); }
}  // namespace

TEST_CASE("spectral functions against complex powers") {
  const double a = 0.6, b = 0.45;
  for (double w : {1e-3, 0.2, 1.0, 7.0, 1e3}) {
    const cd iw(0.0, w);
    CAPTURE(w);
    CHECK(cabs_rel(spectral(make(ModelKind::Debye, 1, 1), w), 1.0 / (1.0 + iw)) < 1e-14);
    CHECK(cabs_rel(spectral(make(ModelKind::CC, a, 1), w), 1.0 / (1.0 + std::pow(iw, a))) < 1e-13);
    CHECK(cabs_rel(spectral(make(ModelKind::CD, 1, b), w), std::pow(1.0 + iw, -b)) < 1e-13);
    CHECK(cabs_rel(spectral(make(ModelKind::HN, a, b), w),
                   std::pow(1.0 + std::pow(iw, a), -b)) < 1e-13);
    const cd jws = 1.0 - std::pow(1.0 + std::pow(iw, -a), -b);
    CHECK(cabs_rel(spectral(make(ModelKind::JWS, a, b), w), jws) < 1e-12);
  }
  CHECK_THROWS_AS(spectral(make(ModelKind::KWW, 0.5, 1), 1.0), DomainError);
}

TEST_CASE("permittivity") {
  const Permittivity p = permittivity(make(ModelKind::Debye, 1, 1), {2.0, 1.0}, 1.0);
  CHECK(p.eps_re == doctest::Approx(1.5));
  CHECK(p.eps_im == doctest::Approx(0.5));
  const ModelSpec hn = make(ModelKind::HN, 0.7, 0.4, 2.0);
  for (double w : {1e-2, 0.5, 30.0}) {
    const Permittivity t = permittivity(hn, {5.0, 2.0}, w, PermittivityRoute::Trigonometric);
    const Permittivity s = permittivity(hn, {5.0, 2.0}, w, PermittivityRoute::Spectral);
    CHECK(t.eps_re == doctest::Approx(s.eps_re).epsilon(1e-13));
    CHECK(t.eps_im == doctest::Approx(s.eps_im).epsilon(1e-13));
  }
  CHECK_THROWS_AS(validate(PermittivityScale{1.0, 2.0}), DomainError);
}

TEST_CASE("relaxation functions with classical closed forms") {
  for (double t : {1e-3, 0.1, 0.8, 2.0, 9.0}) {
    CAPTURE(t);
    // Cole-Davidson: regularized upper incomplete gamma
    CHECK(relaxation(make(ModelKind::CD, 1, 0.35, 1.5), t) ==
          doctest::Approx(boost::math::gamma_q(0.35, t / 1.5)).epsilon(1e-12));
    // Cole-Cole at 1/2: exp(t) erfc(sqrt t)
    CHECK(relaxation(make(ModelKind::CC, 0.5, 1), t) ==
          doctest::Approx(std::exp(t) * std::erfc(std::sqrt(t))).epsilon(1e-11));
    CHECK(relaxation(make(ModelKind::KWW, 0.4, 1, 2.0), t) ==
          doctest::Approx(std::exp(-std::pow(t / 2.0, 0.4))).epsilon(1e-14));
    // modified Cole-Davidson: Kummer 1F1(beta; 1; -t)
    CHECK(relaxation(make(ModelKind::MCD, 1, 0.6), t) ==
          doctest::Approx(boost::math::hypergeometric_1F1(0.6, 1.0, -t)).epsilon(1e-11));
    CHECK(relaxation(make(ModelKind::JWS, 0.7, 1), t) ==
          doctest::Approx(relaxation(make(ModelKind::CC, 0.7, 1), t)).epsilon(1e-11));
    CHECK(relaxation(make(ModelKind::Debye, 1, 1, 0.5), t) ==
          doctest::Approx(std::exp(-t / 0.5)).epsilon(1e-14));
  }
  CHECK(relaxation(make(ModelKind::HN, 0.5, 0.5), 0.0) == 1.0);
}

TEST_CASE("response is minus the derivative of relaxation") {
  for (auto s : {make(ModelKind::HN, 0.6, 0.7), make(ModelKind::JWS, 0.5, 0.8),
                 make(ModelKind::CD, 1, 0.4)}) {
    for (double t : {0.05, 0.5, 3.0}) {
      const double h = 1e-5 * t;
      const double fd = -(relaxation(s, t + h) - relaxation(s, t - h)) / (2 * h);
      CAPTURE(to_string(s.kind));
      CAPTURE(t);
      CHECK(response(s, t).regular == doctest::Approx(fd).epsilon(1e-7));
      CHECK(relaxation_derivative(s, t, 1) == doctest::Approx(-fd).epsilon(1e-7));
    }
  }
}

TEST_CASE("distribution of relaxation rates reproduces n(t)") {
  boost::math::quadrature::exp_sinh<double> q;
  for (auto s : {make(ModelKind::HN, 0.6, 0.7), make(ModelKind::CC, 0.5, 1),
                 make(ModelKind::JWS, 0.75, 0.5), make(ModelKind::CD, 1, 0.5)}) {
    for (double t : {0.3, 1.0, 4.0}) {
      // CD lives on xi > 1 with an integrable singularity at the edge
      const double lo = s.kind == ModelKind::CD ? 1.0 : 0.0;
      const double n = q.integrate([&](double xi) { return std::exp(-t * xi) * pdf_g(s, xi); },
                                   lo, std::numeric_limits<double>::infinity());
      CAPTURE(to_string(s.kind));
      CAPTURE(t);
      CHECK(n == doctest::Approx(relaxation(s, t)).epsilon(1e-8));
    }
  }
}

TEST_CASE("validation") {
  CHECK_THROWS_AS(validate(make(ModelKind::HN, 0.0, 0.5)), DomainError);
  CHECK_THROWS_AS(validate(make(ModelKind::HN, 1.2, 0.5)), DomainError);
  CHECK_THROWS_AS(validate(make(ModelKind::HN, 0.5, -1.0)), DomainError);
  CHECK_THROWS_AS(validate(make(ModelKind::CC, 0.5, 0.5)), DomainError);
  CHECK_THROWS_AS(validate(make(ModelKind::HN, 0.5, 0.5, 0.0)), DomainError);
  ModelSpec strict = make(ModelKind::HN, 0.5, 1.5);
  CHECK_NOTHROW(validate(strict));
  strict.strict_experimental = true;
  CHECK_THROWS_AS(validate(strict), DomainError);
  // beyond 1/alpha the density needs the override
  ModelSpec lobe = make(ModelKind::HN, 0.75, 7.0 / 3.0);
  CHECK_THROWS_AS(pdf_g(lobe, 1.0), DomainError);
  lobe.override_regime = true;
  CHECK(std::isfinite(pdf_g(lobe, 1.0)));
  CHECK_THROWS_AS(pdf_g(make(ModelKind::Debye, 1, 1), 1.0), DomainError);
  CHECK(parse_model_kind("hn") == ModelKind::HN);
  CHECK_THROWS_AS(parse_model_kind("foo"), DomainError);
}

TEST_CASE("asymptotic leading terms") {
  const ModelSpec hn = make(ModelKind::HN, 0.75, 1.0 / 3.0);
  const double t = 1e-6;
  const AsymptoticValue a = asymptotic(hn, Quantity::Response, Regime::Short, t);
  CHECK(a.value == doctest::Approx(response(hn, t).regular).epsilon(1e-2));
  const double ab = 0.25;
  CHECK(a.value == doctest::Approx(std::pow(t, ab - 1.0) / std::tgamma(ab)).epsilon(1e-12));
}
