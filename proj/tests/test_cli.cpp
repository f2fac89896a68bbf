#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "relaxkit/cli.hpp"

using namespace relaxkit;
namespace fs = std::filesystem;

namespace {
struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> v;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) v.push_back(l);
  return v;
}

fs::path scratch_dir() {
  const fs::path d = fs::temp_directory_path() / ("relaxkit_cli_test_" + std::to_string(::getpid()));
  fs::create_directories(d);
  return d;
}
}  // namespace

TEST_CASE("eval tables") {
  const Run r = run({"--model", "debye", "eval", "relaxation", "--grid", "1:2:2"});
  REQUIRE(r.code == kExitOk);
  const auto l = lines(r.out);
  REQUIRE(l.size() == 4);
  CHECK(l[0].rfind("# model=debye", 0) == 0);
  CHECK(l[1] == "t,n");
  CHECK(std::stod(l[2].substr(2)) == doctest::Approx(0.36787944117144233).epsilon(1e-15));

  const Run p = run({"--model", "cd", "--beta", "0.5", "pdf", "--grid", "0.1:0.9:5:lin"});
  REQUIRE(p.code == kExitOk);
  for (std::size_t i = 2; i < lines(p.out).size(); ++i)
    CHECK(lines(p.out)[i].substr(lines(p.out)[i].find(',') + 1) == "0");

  CHECK(lines(run({"--model", "hn", "--alpha", "0.5", "--beta", "0.5", "spectral"}).out)[1] ==
        "omega,phi_real,phi_imag");
  CHECK(lines(run({"--model", "cc", "--alpha", "0.5", "permittivity"}).out)[1] == "omega,eps_re,eps_im");
  CHECK(lines(run({"--model", "cc", "--alpha", "0.5", "kernelM"}).out)[1] == "t,M");
  CHECK(lines(run({"--model", "cc", "--alpha", "0.5", "kernelK"}).out)[1] == "t,k");
  CHECK(lines(run({"--model", "cc", "--alpha", "0.5", "psi"}).out)[1] == "s,psi");
}

TEST_CASE("json output") {
  const Run r = run({"--model", "hn", "--alpha", "0.6", "--beta", "0.4", "--format", "json",
                     "eval", "response", "--grid", "0.1:10:4"});
  REQUIRE(r.code == kExitOk);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["columns"] == nlohmann::json({"t", "phi"}));
  CHECK(j["rows"].size() == 4);
}

TEST_CASE("usage errors exit with 2") {
  CHECK(run({"--model", "hn", "--alpha", "1.5", "eval", "response"}).code == kExitUsage);
  CHECK(run({"--model", "debye", "pdf"}).code == kExitUsage);
  CHECK(run({"--model", "nope", "eval", "relaxation"}).code == kExitUsage);
  CHECK(run({"--model", "debye", "eval", "relaxation", "--grid", "1:2"}).code == kExitUsage);
  CHECK(run({"--model", "debye", "--format", "xml", "relaxation"}).code == kExitUsage);
  CHECK(run({"verify", "nosuch"}).code == kExitUsage);
  const Run e = run({"--bogus"});
  CHECK(e.code == kExitUsage);
  CHECK_FALSE(e.err.empty());
}

TEST_CASE("numeric failures exit with 3") {
  const Run r = run({"--model", "hn", "--alpha", "0.5", "--beta", "0.5", "response", "--grid",
                     "0:1:3:lin"});
  CHECK(r.code == kExitNumeric);
  CHECK(r.err.find("t > 0") != std::string::npos);
}

TEST_CASE("synth, fit and non-convergence") {
  const fs::path dir = scratch_dir();
  const fs::path data = dir / "hn.csv";
  const std::vector<std::string> synth = {"--model", "hn", "--alpha", "0.6", "--beta", "0.5",
                                          "--grid", "1e-3:1e3:30", "--seed", "9", "synth",
                                          "--noise", "0.01"};
  const Run a = run(synth);
  const Run b = run(synth);
  REQUIRE(a.code == kExitOk);
  CHECK(a.out == b.out);
  {
    std::ofstream f(data);
    f << a.out;
  }
  const Run f = run({"fit", "--model", "hn", "--input", data.string()});
  REQUIRE(f.code == kExitOk);
  const auto j = nlohmann::json::parse(f.out);
  CHECK(j["model"] == "hn");
  CHECK(j["alpha"].get<double>() == doctest::Approx(0.6).epsilon(0.05));

  CHECK(run({"fit", "--model", "hn", "--input", data.string(), "--max-iterations", "1"}).code ==
        kExitNoConvergence);
  CHECK(run({"fit", "--input", data.string()}).code == kExitUsage);

  const fs::path bad = dir / "bad.csv";
  {
    std::ofstream o(bad);
    o << "omega,eps_re,eps_im\n1,2,3\n0.5,2,3\n";
  }
  const Run pe = run({"fit", "--model", "cc", "--input", bad.string()});
  CHECK(pe.code == kExitUsage);
  CHECK(pe.err.find("line 3") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("output files are written whole") {
  const fs::path dir = scratch_dir();
  const fs::path target = dir / "out.csv";
  const Run r = run({"--model", "cc", "--alpha", "0.7", "--output", target.string(), "relaxation"});
  REQUIRE(r.code == kExitOk);
  CHECK(r.out.empty());
  std::ifstream in(target);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(lines(ss.str()).size() == 52);
  std::size_t files = 0;
  for ([[maybe_unused]] auto& e : fs::directory_iterator(dir)) ++files;
  CHECK(files == 1);

  // a failed run leaves the previous file untouched
  const std::string before = ss.str();
  CHECK(run({"--model", "cc", "--alpha", "0.7", "--output", target.string(), "response", "--grid",
             "0:1:3:lin"}).code == kExitNumeric);
  std::ifstream again(target);
  std::stringstream s2;
  s2 << again.rdbuf();
  CHECK(s2.str() == before);
  fs::remove_all(dir);
}

TEST_CASE("verify") {
  const Run ok = run({"verify", "reductions"});
  CHECK(ok.code == kExitOk);
  const auto j = nlohmann::json::parse(ok.out);
  CHECK(j["passed"] == true);
  CHECK(j["checks"][0].contains("max_error"));

  const Run fail = run({"verify", "reductions", "--override", "reductions/debye_relaxation=-1"});
  CHECK(fail.code == kExitUsage);
  const Run tight = run({"verify", "pdf", "--tol", "1e-30"});
  CHECK(tight.code == kExitVerifyFailed);
  CHECK(tight.err.find("FAIL") != std::string::npos);
}
