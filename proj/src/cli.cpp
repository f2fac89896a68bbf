#include "relaxkit/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <unistd.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "relaxkit/fitio.hpp"
#include "relaxkit/kernels.hpp"
#include "relaxkit/models.hpp"
#include "relaxkit/parallel.hpp"
#include "relaxkit/verify.hpp"

namespace relaxkit {

namespace {

namespace fs = std::filesystem;

const std::vector<std::string> kQuantities = {"spectral", "permittivity", "response", "relaxation",
                                              "pdf",      "kernelM",      "kernelK",  "psi"};

// Bad flag combinations found after parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

struct Table {
  std::vector<std::string> comments;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
};

std::string render(const Table& t, const std::string& format) {
  std::ostringstream os;
  if (format == "json") {
    nlohmann::ordered_json j = t.meta;
    j["columns"] = t.columns;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& r : t.rows) {
      nlohmann::ordered_json row = nlohmann::ordered_json::array();
      for (double v : r) {
        if (std::isfinite(v))
          row.push_back(v);
        else
          row.push_back(nullptr);
      }
      rows.push_back(std::move(row));
    }
    j["rows"] = std::move(rows);
    os << j.dump(2) << '\n';
    return os.str();
  }
  for (const auto& c : t.comments) os << "# " << c << '\n';
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << '\n';
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << num(r[i]);
    os << '\n';
  }
  return os.str();
}

// Write to a sibling temporary and rename over the target.
void write_atomically(const std::string& path, const std::string& content) {
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + tmp.string());
    f << content;
    f.flush();
    if (!f) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw std::runtime_error("cannot move output into place: " + path);
  }
}

struct Globals {
  std::string model;
  std::optional<double> alpha, beta, tau;
  double eps0 = 2.0, epsinf = 1.0;
  std::string grid;
  std::string output;
  std::string format = "csv";
  std::optional<double> tol;
  std::uint64_t seed = 1;
  bool strict = false;
  bool override_regime = false;
};

ModelSpec spec_from(const Globals& g) {
  if (g.model.empty()) throw UsageError("--model is required");
  ModelSpec s;
  try {
    s.kind = parse_model_kind(g.model);
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  s.alpha = g.alpha.value_or(1.0);
  s.beta = g.beta.value_or(1.0);
  s.tau = g.tau.value_or(1.0);
  s.strict_experimental = g.strict;
  s.override_regime = g.override_regime;
  s = pinned(s);
  try {
    validate(s);
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  return s;
}

std::vector<double> grid_from(const Globals& g, const std::string& fallback) {
  try {
    return grid_values(parse_grid(g.grid.empty() ? fallback : g.grid));
  } catch (const std::exception& e) {
    throw UsageError(std::string("--grid: ") + e.what());
  }
}

void emit(const Globals& g, const std::string& content, std::ostream& out) {
  if (g.output.empty())
    out << content;
  else
    write_atomically(g.output, content);
}

// -------------------------------------------------------------------- eval

Table eval_table(const Globals& g, const std::string& q, double rate, std::ostream& err) {
  const ModelSpec s = spec_from(g);
  Table t;
  t.meta["quantity"] = q;
  t.meta["model"] = to_string(s.kind);
  t.meta["alpha"] = s.alpha;
  t.meta["beta"] = s.beta;
  t.meta["tau"] = s.tau;
  t.comments.push_back("model=" + to_string(s.kind) + " alpha=" + num(s.alpha) +
                       " beta=" + num(s.beta) + " tau=" + num(s.tau));
  const bool freq = q == "spectral" || q == "permittivity" || q == "psi";
  const std::vector<double> x =
      grid_from(g, freq ? "1e-3:1e3:61:log" : (q == "pdf" ? "1e-3:1e3:61:log" : "1e-2:1e2:50:log"));
  const std::size_t n = x.size();
  std::vector<double> second(n);
  std::vector<double> first;

  auto delta = [&](double w) {
    if (w != 0.0) t.comments.push_back("delta_weight=" + num(w));
    t.meta["delta_weight"] = w;
  };

  if (q == "spectral") {
    if (s.kind == ModelKind::KWW) throw UsageError("KWW has no closed-form spectral function");
    t.columns = {"omega", "phi_real", "phi_imag"};
    first = parallel_map(n, [&](std::size_t i) {
      const auto v = spectral(s, x[i] * s.tau);
      second[i] = v.imag();
      return v.real();
    });
  } else if (q == "permittivity") {
    if (s.kind == ModelKind::KWW) throw UsageError("KWW has no closed-form permittivity");
    const PermittivityScale sc{g.eps0, g.epsinf};
    try {
      validate(sc);
    } catch (const DomainError& e) {
      throw UsageError(e.what());
    }
    t.meta["eps_static"] = sc.eps_static;
    t.meta["eps_inf"] = sc.eps_inf;
    t.columns = {"omega", "eps_re", "eps_im"};
    first = parallel_map(n, [&](std::size_t i) {
      const Permittivity p = permittivity(s, sc, x[i]);
      second[i] = p.eps_im;
      return p.eps_re;
    });
  } else if (q == "response") {
    t.columns = {"t", "phi"};
    delta(response(s, x.front()).singular_weight);
    first = parallel_map(n, [&](std::size_t i) { return response(s, x[i]).regular; });
  } else if (q == "relaxation") {
    t.columns = {"t", "n"};
    first = parallel_map(n, [&](std::size_t i) { return relaxation(s, x[i]); });
  } else if (q == "pdf") {
    if (s.kind == ModelKind::Debye || (s.kind != ModelKind::KWW && s.alpha == 1.0 && s.beta == 1.0))
      throw UsageError("the Debye distribution is a point mass at xi = 1");
    if (s.kind == ModelKind::KWW) throw UsageError("no closed-form density for KWW");
    t.columns = {"xi", "g"};
    first = parallel_map(n, [&](std::size_t i) { return pdf_g(s, x[i]); });
  } else {
    if (!has_kernels(s.kind)) throw UsageError("KWW has no memory-kernel pair");
    if (!(rate > 0.0)) throw UsageError("--rate must be positive");
    const KernelConfig cfg{s, rate};
    t.meta["rate"] = rate;
    if (q == "psi") {
      t.columns = {"s", "psi"};
      first = parallel_map(n, [&](std::size_t i) { return characteristic_exponent(cfg, x[i]); });
    } else {
      const bool is_M = q == "kernelM";
      t.columns = {"t", is_M ? "M" : "k"};
      std::vector<double> tails(n);
      std::vector<char> truncated(n, 0);
      double weight = 0.0;
      first = parallel_map(n, [&](std::size_t i) {
        const KernelValue v = is_M ? memory_M_time(cfg, x[i]) : memory_k_time(cfg, x[i]);
        tails[i] = v.tail_bound;
        truncated[i] = v.truncated;
        if (i == 0) weight = v.singular_weight;
        return v.regular;
      });
      delta(weight);
      for (std::size_t i = 0; i < n; ++i)
        if (truncated[i])
          err << "TruncationWarning: " << q << " at t=" << num(x[i])
              << " has tail bound " << num(tails[i]) << '\n';
    }
  }
  t.rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (t.columns.size() == 3)
      t.rows.push_back({x[i], first[i], second[i]});
    else
      t.rows.push_back({x[i], first[i]});
  }
  return t;
}

// --------------------------------------------------------------------- fit

Domain parse_domain(const std::string& d) {
  if (d == "frequency") return Domain::Frequency;
  if (d == "time") return Domain::Time;
  throw UsageError("--domain must be frequency or time");
}

int cmd_fit(const Globals& g, const std::string& input, const std::string& domain, bool automatic,
            int max_iter, std::ostream& out, std::ostream& err) {
  if (input.empty()) throw UsageError("fit needs --input");
  if (automatic == !g.model.empty()) throw UsageError("fit needs exactly one of --model or --auto");
  const Domain dom = parse_domain(domain);
  Dataset data;
  try {
    data = read_csv(input, dom);
  } catch (const ParseError& e) {
    err << input << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const EmptyDataset& e) {
    err << input << ": " << e.what() << '\n';
    return kExitUsage;
  }
  std::visit([&](const auto& d) {
    for (const auto& w : d.warnings) err << "warning: " << w << '\n';
  }, data);
  FitOptions opt;
  opt.strict_experimental = g.strict;
  opt.max_iterations = max_iter;
  if (g.tol) opt.gradient_tol = *g.tol;
  FitResult r;
  if (automatic) {
    r = fit_auto(data, opt);
  } else {
    ModelSpec s;
    try {
      s.kind = parse_model_kind(g.model);
    } catch (const DomainError& e) {
      throw UsageError(e.what());
    }
    if (g.alpha || g.beta || g.tau) {
      s.alpha = g.alpha.value_or(0.8);
      s.beta = g.beta.value_or(0.8);
      s.tau = g.tau.value_or(1.0);
      s.strict_experimental = g.strict;
      s = pinned(s);
      try {
        validate(s);
      } catch (const DomainError& e) {
        throw UsageError(e.what());
      }
      opt.init = s;
    }
    r = fit(data, s.kind, opt);
  }
  emit(g, to_json(r) + "\n", out);
  if (!r.converged) {
    err << "fit did not converge after " << r.iterations << " iterations\n";
    return kExitNoConvergence;
  }
  return kExitOk;
}

// ------------------------------------------------------------------- synth

int cmd_synth(const Globals& g, const std::string& domain, double noise, std::ostream& out) {
  const ModelSpec s = spec_from(g);
  const Domain dom = parse_domain(domain);
  if (!(noise >= 0.0) || !std::isfinite(noise)) throw UsageError("--noise must be nonnegative");
  std::ostringstream meta;
  meta << "synthetic model=" << to_string(s.kind) << " alpha=" << num(s.alpha)
       << " beta=" << num(s.beta) << " tau=" << num(s.tau) << " noise=" << num(noise)
       << " seed=" << g.seed;
  Dataset d;
  if (dom == Domain::Frequency) {
    if (s.kind == ModelKind::KWW) throw UsageError("KWW spectra are not available; use --domain time");
    const PermittivityScale sc{g.eps0, g.epsinf};
    try {
      validate(sc);
    } catch (const DomainError& e) {
      throw UsageError(e.what());
    }
    SpectrumDataset sd =
        synthesize_spectrum(s, sc, grid_from(g, "1e-3:1e3:40:log"), noise, g.seed);
    sd.meta = meta.str() + " eps0=" + num(g.eps0) + " epsinf=" + num(g.epsinf);
    d = std::move(sd);
  } else {
    TimeDataset td = synthesize_relaxation(s, grid_from(g, "1e-2:1e2:40:log"), noise, g.seed);
    td.meta = meta.str();
    d = std::move(td);
  }
  std::ostringstream os;
  if (g.format == "json") {
    Table t;
    if (auto* sd = std::get_if<SpectrumDataset>(&d)) {
      t.columns = {"omega", "eps_re", "eps_im"};
      for (std::size_t i = 0; i < sd->size(); ++i) t.rows.push_back({sd->omega[i], sd->eps_re[i], sd->eps_im[i]});
      t.meta["meta"] = sd->meta;
    } else {
      const auto& td = std::get<TimeDataset>(d);
      t.columns = {"t", "n"};
      for (std::size_t i = 0; i < td.size(); ++i) t.rows.push_back({td.t[i], td.n[i]});
      t.meta["meta"] = td.meta;
    }
    os << render(t, "json");
  } else {
    write_csv(os, d);
  }
  emit(g, os.str(), out);
  return kExitOk;
}

// ------------------------------------------------------------------ verify

int cmd_verify(const Globals& g, const std::string& suite, const std::vector<std::string>& overrides,
               const std::string& tables_dir, std::ostream& out, std::ostream& err) {
  if (!is_suite(suite)) throw UsageError("unknown suite: " + suite);
  VerifyOptions opt;
  opt.tolerance = g.tol;
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw UsageError("--override expects suite/name=value");
    double v = 0.0;
    const std::string val = o.substr(eq + 1);
    auto res = std::from_chars(val.data(), val.data() + val.size(), v);
    if (res.ec != std::errc() || res.ptr != val.data() + val.size() || !(v >= 0.0))
      throw UsageError("--override value must be a nonnegative number: " + o);
    opt.overrides[o.substr(0, eq)] = v;
  }
  if (!tables_dir.empty()) {
    std::error_code ec;
    fs::create_directories(tables_dir, ec);
    if (ec) throw UsageError("cannot create " + tables_dir);
    for (const auto& t : figure_tables())
      write_atomically((fs::path(tables_dir) / (t.name + ".csv")).string(), to_csv(t));
  }
  const auto results = run_suite(suite, opt);
  std::string content;
  if (g.format == "csv") {
    std::ostringstream os;
    os << "suite,name,max_error,tolerance,passed\n";
    for (const auto& r : results)
      os << r.suite << ',' << r.name << ',' << num(r.max_error) << ',' << num(r.tolerance) << ','
         << (r.passed ? "true" : "false") << '\n';
    content = os.str();
  } else {
    content = report_json(results) + "\n";
  }
  emit(g, content, out);
  for (const auto& r : results)
    if (!r.passed)
      err << "FAIL " << r.suite << "/" << r.name << ": max_error " << num(r.max_error)
          << " > " << num(r.tolerance) << (r.detail.empty() ? "" : " (" + r.detail + ")") << '\n';
  return all_passed(results) ? kExitOk : kExitVerifyFailed;
}

// A bare quantity name selects eval: `relaxkit --model debye relaxation`.
std::vector<std::string> normalize(std::vector<std::string> args) {
  static const std::vector<std::string> subcommands = {"eval", "fit", "synth", "verify"};
  for (std::size_t i = 0; i < args.size(); ++i) {
    const auto& a = args[i];
    if (std::find(subcommands.begin(), subcommands.end(), a) != subcommands.end()) break;
    if (std::find(kQuantities.begin(), kQuantities.end(), a) != kQuantities.end()) {
      args.insert(args.begin() + static_cast<long>(i), "eval");
      break;
    }
  }
  return args;
}

}  // namespace

int run_cli(const std::vector<std::string>& raw, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dielectric relaxation models: evaluation, fitting, synthesis and checks", "relaxkit"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--model", g.model, "debye, cc, cd, mcd, hn, jws or kww")
      ->check(CLI::IsMember({"debye", "cc", "cd", "mcd", "hn", "jws", "kww"}));
  app.add_option("--alpha", g.alpha, "shape parameter alpha (KWW: stretching exponent)");
  app.add_option("--beta", g.beta, "shape parameter beta");
  app.add_option("--tau", g.tau, "relaxation time");
  app.add_option("--eps0", g.eps0, "static permittivity")->capture_default_str();
  app.add_option("--epsinf", g.epsinf, "high-frequency permittivity")->capture_default_str();
  app.add_option("--grid", g.grid, "start:stop:points[:log|:lin]");
  app.add_option("--output", g.output, "output file, written atomically");
  app.add_option("--format", g.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  app.add_option("--tol", g.tol, "tolerance (fit: gradient tolerance; verify: every check)");
  app.add_option("--seed", g.seed, "random seed")->capture_default_str();
  app.add_flag("--strict-experimental", g.strict, "restrict beta to (0, 1]");
  app.add_flag("--override-regime", g.override_regime, "admit beta > 1/alpha");

  std::string quantity;
  double rate = 1.0;
  auto* eval = app.add_subcommand("eval", "tabulate a quantity on a grid");
  eval->add_option("quantity", quantity, "quantity")->required()->check(CLI::IsMember(kQuantities));
  eval->add_option("--rate", rate, "rate B of the evolution equation (kernels)")->capture_default_str();
  eval->fallthrough();

  std::string input, domain = "frequency";
  bool automatic = false;
  int max_iter = 200;
  auto* fitc = app.add_subcommand("fit", "fit a model to a CSV dataset");
  fitc->add_option("--input", input, "CSV file");
  fitc->add_option("--domain", domain, "frequency or time")->capture_default_str();
  fitc->add_flag("--auto", automatic, "select the model by AICc");
  fitc->add_option("--max-iterations", max_iter, "iteration cap")->capture_default_str();
  fitc->fallthrough();

  double noise = 0.0;
  std::string synth_domain = "frequency";
  auto* synth = app.add_subcommand("synth", "write a synthetic dataset");
  synth->add_option("--domain", synth_domain, "frequency or time")->capture_default_str();
  synth->add_option("--noise", noise, "relative Gaussian noise level")->capture_default_str();
  synth->fallthrough();

  std::string suite = "all", tables;
  std::vector<std::string> overrides;
  auto* ver = app.add_subcommand("verify", "run the property checks");
  ver->add_option("suite", suite, "suite name")->check(CLI::IsMember(suite_names()))->capture_default_str();
  ver->add_option("--override", overrides, "per-check tolerance, suite/name=value");
  ver->add_option("--tables", tables, "directory for the figure data tables");
  ver->fallthrough();

  std::vector<std::string> args = normalize(raw);
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  const bool verify_cmd = ver->parsed();
  if (verify_cmd && !app.get_option("--format")->count()) g.format = "json";

  try {
    if (eval->parsed()) {
      emit(g, render(eval_table(g, quantity, rate, err), g.format), out);
      return kExitOk;
    }
    if (fitc->parsed()) return cmd_fit(g, input, domain, automatic, max_iter, out, err);
    if (synth->parsed()) return cmd_synth(g, synth_domain, noise, out);
    return cmd_verify(g, suite, overrides, tables, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  }
}

int run_cli(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace relaxkit
