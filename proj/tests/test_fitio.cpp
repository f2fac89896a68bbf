#include <cmath>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "relaxkit/fitio.hpp"

using namespace relaxkit;

namespace {
ModelSpec make(ModelKind k, double a, double b, double tau = 1.0) {
  ModelSpec s;
  s.kind = k;
  s.alpha = a;
  s.beta = b;
  s.tau = tau;
  return s;
}

std::size_t error_line(const std::string& text, Domain d) {
  std::istringstream in(text);
  try {
    parse_csv(in, d);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

const PermittivityScale kScale{5.0, 2.0};
}  // namespace

TEST_CASE("csv parsing") {
  std::istringstream ok("# comment\nomega,eps_re,eps_im\n0.1,4.9,0.2\n\n1.0,3.5,1.4\n");
  const auto d = std::get<SpectrumDataset>(parse_csv(ok, Domain::Frequency));
  CHECK(d.size() == 2);
  CHECK(d.eps_im[1] == 1.4);
  CHECK(d.weights.empty());

  std::istringstream w("t,n,weight\n0,1,1\n1,0.4,2\n");
  const auto td = std::get<TimeDataset>(parse_csv(w, Domain::Time));
  CHECK(td.weights == std::vector<double>{1, 2});

  CHECK(error_line("omega,eps_re\n1,2\n", Domain::Frequency) == 1);
  CHECK(error_line("omega,eps_re,eps_im\n1,2,3\n1,2,3\n", Domain::Frequency) == 3);
  CHECK(error_line("omega,eps_re,eps_im\n1,2\n", Domain::Frequency) == 2);
  CHECK(error_line("omega,eps_re,eps_im\n# x\n1,abc,3\n", Domain::Frequency) == 3);
  CHECK(error_line("omega,eps_re,eps_im\n-1,2,3\n", Domain::Frequency) == 2);
  CHECK(error_line("t,n,weight\n0,1,0\n", Domain::Time) == 2);
  CHECK(error_line("t,n\n0,1\n1,nan\n", Domain::Time) == 3);

  std::istringstream empty("omega,eps_re,eps_im\n");
  CHECK_THROWS_AS(parse_csv(empty, Domain::Frequency), EmptyDataset);

  std::istringstream neg("omega,eps_re,eps_im\n1,2,-0.1\n");
  const auto nd = std::get<SpectrumDataset>(parse_csv(neg, Domain::Frequency));
  REQUIRE(nd.warnings.size() == 1);
  CHECK(nd.warnings[0].find("line 2") == 0);
}

TEST_CASE("csv round trip") {
  const auto d = synthesize_spectrum(make(ModelKind::CC, 0.7, 1), kScale,
                                     grid_values(parse_grid("1e-2:1e2:7")), 0.0, 1);
  std::ostringstream out;
  write_csv(out, d);
  std::istringstream in(out.str());
  const auto back = std::get<SpectrumDataset>(parse_csv(in, Domain::Frequency));
  CHECK(back.omega == d.omega);
  CHECK(back.eps_re == d.eps_re);
  CHECK(back.eps_im == d.eps_im);
}

TEST_CASE("grids") {
  const GridSpec g = parse_grid("1e-3:1e3:7");
  CHECK(g.log);
  const auto v = grid_values(g);
  REQUIRE(v.size() == 7);
  CHECK(v.front() == 1e-3);
  CHECK(v.back() == 1e3);
  CHECK(v[3] == doctest::Approx(1.0));
  const auto lin = grid_values(parse_grid("0:1:5:lin"));
  CHECK(lin[2] == doctest::Approx(0.5));
  CHECK_THROWS(parse_grid("1:2"));
  CHECK_THROWS(parse_grid("0:1:5:log"));
  CHECK_THROWS(parse_grid("2:1:5"));
  CHECK_THROWS(parse_grid("1:2:1"));
}

TEST_CASE("synthetic data is reproducible") {
  const auto w = grid_values(parse_grid("1e-2:1e2:20"));
  const ModelSpec hn = make(ModelKind::HN, 0.6, 0.5);
  const auto a = synthesize_spectrum(hn, kScale, w, 0.01, 7);
  const auto b = synthesize_spectrum(hn, kScale, w, 0.01, 7);
  const auto c = synthesize_spectrum(hn, kScale, w, 0.01, 8);
  CHECK(a.eps_re == b.eps_re);
  CHECK(a.eps_im == b.eps_im);
  CHECK(a.eps_re != c.eps_re);
  const auto clean = synthesize_spectrum(hn, kScale, w, 0.0, 7);
  const Permittivity p = permittivity(hn, kScale, w[4]);
  CHECK(clean.eps_re[4] == p.eps_re);
  CHECK(clean.eps_im[4] == p.eps_im);
}

TEST_CASE("noiseless spectra are recovered") {
  const auto w = grid_values(parse_grid("1e-3:1e3:40"));
  const ModelSpec truth = make(ModelKind::HN, 0.75, 1.0 / 3.0, 1.0);
  const auto data = synthesize_spectrum(truth, kScale, w, 0.0, 1);
  const FitResult r = fit(data, ModelKind::HN);
  CHECK(r.converged);
  CHECK(r.residual_norm < 1e-10);
  CHECK(r.spec.alpha == doctest::Approx(0.75).epsilon(1e-6));
  CHECK(r.spec.beta == doctest::Approx(1.0 / 3.0).epsilon(1e-6));
  CHECK(r.spec.tau == doctest::Approx(1.0).epsilon(1e-6));
  REQUIRE(r.scale.has_value());
  CHECK(r.scale->eps_static == doctest::Approx(5.0).epsilon(1e-6));
  CHECK(r.scale->eps_inf == doctest::Approx(2.0).epsilon(1e-6));

  SUBCASE("refitting from the optimum stays there") {
    FitOptions opt;
    opt.init = r.spec;
    const FitResult again = fit(data, ModelKind::HN, opt);
    CHECK(std::fabs(again.spec.alpha - r.spec.alpha) < 1e-8);
    CHECK(std::fabs(again.spec.beta - r.spec.beta) < 1e-8);
    CHECK(std::fabs(again.spec.tau - r.spec.tau) < 1e-8);
  }
  SUBCASE("scaling the data scales the amplitudes") {
    SpectrumDataset scaled = data;
    for (auto& v : scaled.eps_re) v *= 3.0;
    for (auto& v : scaled.eps_im) v *= 3.0;
    const FitResult s = fit(scaled, ModelKind::HN);
    CHECK(s.spec.alpha == doctest::Approx(r.spec.alpha).epsilon(1e-6));
    CHECK(s.scale->eps_static == doctest::Approx(15.0).epsilon(1e-6));
    CHECK(s.scale->eps_inf == doctest::Approx(6.0).epsilon(1e-6));
  }
}

TEST_CASE("time-domain fits") {
  const auto t = grid_values(parse_grid("1e-2:1e2:40"));
  const auto data = synthesize_relaxation(make(ModelKind::KWW, 0.55, 1, 2.0), t, 0.0, 1);
  const FitResult r = fit(data, ModelKind::KWW);
  CHECK(r.spec.alpha == doctest::Approx(0.55).epsilon(1e-6));
  CHECK(r.spec.tau == doctest::Approx(2.0).epsilon(1e-6));
  CHECK_FALSE(r.scale.has_value());
}

TEST_CASE("model selection") {
  const auto w = grid_values(parse_grid("1e-3:1e3:40"));
  for (auto truth : {make(ModelKind::CC, 0.6, 1), make(ModelKind::CD, 1, 0.4),
                     make(ModelKind::JWS, 0.7, 0.5), make(ModelKind::Debye, 1, 1, 0.3)}) {
    const auto data = synthesize_spectrum(truth, kScale, w, 0.0, 3);
    CAPTURE(to_string(truth.kind));
    CHECK(fit_auto(data).spec.kind == truth.kind);
  }
}

TEST_CASE("json report") {
  FitResult r;
  r.spec = make(ModelKind::KWW, 0.5, 1);
  const auto j = nlohmann::ordered_json::parse(to_json(r));
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  CHECK(keys == std::vector<std::string>{"model", "alpha", "beta", "tau", "eps_static", "eps_inf",
                                         "residual_norm", "converged", "iterations", "stderr"});
  CHECK(j["beta"].is_null());
  CHECK(j["eps_static"].is_null());
  CHECK(j["model"] == "kww");
}
