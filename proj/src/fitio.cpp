#include "relaxkit/fitio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include "json.hpp"
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "relaxkit/parallel.hpp"

namespace relaxkit {

namespace {

constexpr double kLogitCap = 36.0;

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    std::size_t c = s.find(',', pos);
    out.push_back(trim(s.substr(pos, c == std::string_view::npos ? s.npos : c - pos)));
    if (c == std::string_view::npos) break;
    pos = c + 1;
  }
  return out;
}

bool to_double(std::string_view s, double& v) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(v);
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
double logit(double y) { return std::log(y / (1.0 - y)); }

}  // namespace

// ---------------------------------------------------------------- CSV

Dataset parse_csv(std::istream& in, Domain domain, const std::string& meta) {
  const std::vector<std::string> cols = domain == Domain::Frequency
                                            ? std::vector<std::string>{"omega", "eps_re", "eps_im"}
                                            : std::vector<std::string>{"t", "n"};
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false, weighted = false;
  std::vector<std::vector<double>> rows;
  std::vector<std::size_t> row_lines;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view s = trim(line);
    if (s.empty() || s.front() == '#') continue;
    auto fields = split(s);
    if (!have_header) {
      std::vector<std::string> got(fields.begin(), fields.end());
      std::vector<std::string> want = cols;
      if (got == want) {
        weighted = false;
      } else {
        want.push_back("weight");
        if (got != want) {
          std::string expect;
          for (auto& c : cols) expect += (expect.empty() ? "" : ",") + c;
          throw ParseError(lineno, "expected header '" + expect + "[,weight]'");
        }
        weighted = true;
      }
      have_header = true;
      continue;
    }
    const std::size_t width = cols.size() + (weighted ? 1 : 0);
    if (fields.size() != width)
      throw ParseError(lineno, "expected " + std::to_string(width) + " fields, found " +
                                   std::to_string(fields.size()));
    std::vector<double> row(width);
    for (std::size_t i = 0; i < width; ++i)
      if (!to_double(fields[i], row[i]))
        throw ParseError(lineno, "field " + std::to_string(i + 1) + " is not a finite number");
    rows.push_back(std::move(row));
    row_lines.push_back(lineno);
  }
  if (!have_header) throw EmptyDataset("no header found");
  if (rows.empty()) throw EmptyDataset("no data rows");

  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double x = rows[i][0];
    if (domain == Domain::Frequency ? !(x > 0.0) : !(x >= 0.0))
      throw ParseError(row_lines[i], domain == Domain::Frequency ? "omega must be positive"
                                                                 : "t must be nonnegative");
    if (i > 0 && !(x > rows[i - 1][0]))
      throw ParseError(row_lines[i], (domain == Domain::Frequency ? std::string("omega")
                                                                  : std::string("t")) +
                                         " must be strictly increasing");
    if (weighted && !(rows[i].back() > 0.0))
      throw ParseError(row_lines[i], "weight must be positive");
  }

  if (domain == Domain::Frequency) {
    SpectrumDataset d;
    d.meta = meta;
    for (auto& r : rows) {
      d.omega.push_back(r[0]);
      d.eps_re.push_back(r[1]);
      d.eps_im.push_back(r[2]);
      if (weighted) d.weights.push_back(r[3]);
    }
    for (std::size_t i = 0; i < rows.size(); ++i)
      if (d.eps_im[i] < 0.0)
        d.warnings.push_back("line " + std::to_string(row_lines[i]) + ": negative eps_im");
    return d;
  }
  TimeDataset d;
  d.meta = meta;
  for (auto& r : rows) {
    d.t.push_back(r[0]);
    d.n.push_back(r[1]);
    if (weighted) d.weights.push_back(r[2]);
  }
  if (std::fabs(d.n.front() - 1.0) > 0.1)
    d.warnings.push_back("line " + std::to_string(row_lines.front()) +
                         ": first relaxation value is far from 1");
  return d;
}

Dataset read_csv(const std::string& path, Domain domain) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open '" + path + "'");
  return parse_csv(in, domain, path);
}

void write_csv(std::ostream& out, const Dataset& data) {
  if (auto* s = std::get_if<SpectrumDataset>(&data)) {
    if (!s->meta.empty()) out << "# " << s->meta << '\n';
    out << "omega,eps_re,eps_im" << (s->weights.empty() ? "" : ",weight") << '\n';
    for (std::size_t i = 0; i < s->size(); ++i) {
      out << fmt(s->omega[i]) << ',' << fmt(s->eps_re[i]) << ',' << fmt(s->eps_im[i]);
      if (!s->weights.empty()) out << ',' << fmt(s->weights[i]);
      out << '\n';
    }
    return;
  }
  const auto& d = std::get<TimeDataset>(data);
  if (!d.meta.empty()) out << "# " << d.meta << '\n';
  out << "t,n" << (d.weights.empty() ? "" : ",weight") << '\n';
  for (std::size_t i = 0; i < d.size(); ++i) {
    out << fmt(d.t[i]) << ',' << fmt(d.n[i]);
    if (!d.weights.empty()) out << ',' << fmt(d.weights[i]);
    out << '\n';
  }
}

// ---------------------------------------------------------------- grids

void validate(const GridSpec& g) {
  if (!std::isfinite(g.start) || !std::isfinite(g.stop) || !(g.start < g.stop))
    throw DomainError("grid needs finite start < stop");
  if (g.points < 2) throw DomainError("grid needs at least 2 points");
  if (g.log && !(g.start > 0.0)) throw DomainError("log grid needs start > 0");
}

GridSpec parse_grid(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.size() < 3 || parts.size() > 4)
    throw DomainError("grid must be start:stop:points[:log|:lin]");
  GridSpec g;
  if (!to_double(trim(parts[0]), g.start) || !to_double(trim(parts[1]), g.stop))
    throw DomainError("grid start and stop must be numbers");
  const auto pts = trim(parts[2]);
  auto [ptr, ec] = std::from_chars(pts.data(), pts.data() + pts.size(), g.points);
  if (ec != std::errc() || ptr != pts.data() + pts.size())
    throw DomainError("grid point count must be an integer");
  if (parts.size() == 4) {
    if (parts[3] == "log")
      g.log = true;
    else if (parts[3] == "lin")
      g.log = false;
    else
      throw DomainError("grid spacing must be 'log' or 'lin'");
  }
  validate(g);
  return g;
}

std::vector<double> grid_values(const GridSpec& g) {
  validate(g);
  std::vector<double> v(g.points);
  const double n1 = g.points - 1;
  if (g.log) {
    const double a = std::log10(g.start), b = std::log10(g.stop);
    for (int i = 0; i < g.points; ++i) v[i] = std::pow(10.0, a + (b - a) * i / n1);
  } else {
    for (int i = 0; i < g.points; ++i) v[i] = g.start + (g.stop - g.start) * i / n1;
  }
  v.front() = g.start;
  v.back() = g.stop;
  return v;
}

// ---------------------------------------------------------------- synthesis

SpectrumDataset synthesize_spectrum(const ModelSpec& spec, const PermittivityScale& scale,
                                    const std::vector<double>& omega, double noise_rel,
                                    std::uint64_t seed) {
  validate(spec);
  validate(scale);
  if (!(noise_rel >= 0.0)) throw DomainError("noise must be nonnegative");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  SpectrumDataset d;
  d.meta = "synthetic " + to_string(spec.kind);
  for (double w : omega) {
    Permittivity p = permittivity(spec, scale, w);
    const double n1 = normal(rng), n2 = normal(rng);
    d.omega.push_back(w);
    d.eps_re.push_back(p.eps_re * (1.0 + noise_rel * n1));
    d.eps_im.push_back(p.eps_im * (1.0 + noise_rel * n2));
  }
  return d;
}

TimeDataset synthesize_relaxation(const ModelSpec& spec, const std::vector<double>& t,
                                  double noise_rel, std::uint64_t seed) {
  validate(spec);
  if (!(noise_rel >= 0.0)) throw DomainError("noise must be nonnegative");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  TimeDataset d;
  d.meta = "synthetic " + to_string(spec.kind);
  auto exact = parallel_map(t.size(), [&](std::size_t i) { return relaxation(spec, t[i]); });
  for (std::size_t i = 0; i < t.size(); ++i) {
    d.t.push_back(t[i]);
    d.n.push_back(exact[i] * (1.0 + noise_rel * normal(rng)));
  }
  return d;
}

// ---------------------------------------------------------------- fitting

namespace {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Parameter vector layout and the maps between transformed and natural values.
struct Layout {
  ModelKind kind;
  Domain domain;
  bool strict = false;
  FitBounds box;
  double tau_lo = 0.0, tau_hi = 0.0;
  int ia = -1, ib = -1, itau = -1, ie0 = -1, iei = -1, n = 0;

  bool beta_via_product() const {
    return !strict && (kind == ModelKind::HN || kind == ModelKind::JWS);
  }

  double alpha_hi() const { return std::min(box.alpha_max, 1.0); }
  double beta_hi() const {
    return (kind == ModelKind::CD || kind == ModelKind::MCD || strict) ? std::min(box.beta_max, 1.0)
                                                                      : box.beta_max;
  }

  double alpha_of(const Vec& p) const {
    if (ia < 0) return 1.0;
    return box.alpha_min + (alpha_hi() - box.alpha_min) * sigmoid(p[ia]);
  }
  double beta_of(const Vec& p) const {
    if (ib < 0) return 1.0;
    if (beta_via_product()) return sigmoid(p[ib]) / alpha_of(p);
    return box.beta_min + (beta_hi() - box.beta_min) * sigmoid(p[ib]);
  }

  ModelSpec spec_of(const Vec& p) const {
    ModelSpec s;
    s.kind = kind;
    s.alpha = alpha_of(p);
    s.beta = beta_of(p);
    s.tau = std::exp(p[itau]);
    s.strict_experimental = strict;
    return s;
  }
  PermittivityScale scale_of(const Vec& p) const { return {p[ie0], p[iei]}; }

  void set_alpha(Vec& p, double a) const {
    if (ia < 0) return;
    const double y = (a - box.alpha_min) / (alpha_hi() - box.alpha_min);
    p[ia] = std::clamp(logit(std::clamp(y, 1e-15, 1.0 - 1e-15)), -kLogitCap, kLogitCap);
  }
  void set_beta(Vec& p, double b) const {
    if (ib < 0) return;
    double y;
    if (beta_via_product())
      y = b * alpha_of(p);
    else
      y = (b - box.beta_min) / (beta_hi() - box.beta_min);
    p[ib] = std::clamp(logit(std::clamp(y, 1e-15, 1.0 - 1e-15)), -kLogitCap, kLogitCap);
  }

  // Box projection.
  Vec project(Vec p) const {
    if (ia >= 0) p[ia] = std::clamp(p[ia], -kLogitCap, kLogitCap);
    if (ib >= 0) {
      p[ib] = std::clamp(p[ib], -kLogitCap, kLogitCap);
      const double b = beta_of(p);
      const double bc = std::clamp(b, box.beta_min, box.beta_max);
      if (bc != b) set_beta(p, bc);
    }
    p[itau] = std::clamp(p[itau], std::log(tau_lo), std::log(tau_hi));
    return p;
  }

  std::vector<std::string> natural_names() const {
    std::vector<std::string> out;
    if (ia >= 0) out.push_back("alpha");
    if (ib >= 0) out.push_back("beta");
    out.push_back("tau");
    if (ie0 >= 0) {
      out.push_back("eps_static");
      out.push_back("eps_inf");
    }
    return out;
  }
  Vec natural(const Vec& p) const {
    Vec v(n);
    int k = 0;
    if (ia >= 0) v[k++] = alpha_of(p);
    if (ib >= 0) v[k++] = beta_of(p);
    v[k++] = std::exp(p[itau]);
    if (ie0 >= 0) {
      v[k++] = p[ie0];
      v[k++] = p[iei];
    }
    return v;
  }
};

bool fits_alpha(ModelKind k) {
  return k == ModelKind::CC || k == ModelKind::HN || k == ModelKind::JWS || k == ModelKind::KWW;
}
bool fits_beta(ModelKind k) {
  return k == ModelKind::CD || k == ModelKind::MCD || k == ModelKind::HN || k == ModelKind::JWS;
}

Layout make_layout(ModelKind kind, Domain domain, const FitOptions& opt, double x_lo,
                   double x_hi) {
  Layout L;
  L.kind = kind;
  L.domain = domain;
  L.strict = opt.strict_experimental;
  L.box = opt.bounds;
  if (!(L.box.alpha_min > 0.0 && L.box.alpha_min < L.alpha_hi()))
    throw DomainError("alpha bounds must satisfy 0 < min < max <= 1");
  if (!(L.box.beta_min > 0.0 && L.box.beta_min < L.beta_hi()))
    throw DomainError("beta bounds must satisfy 0 < min < max");
  // Time scales reachable from the sampled window, with generous margins.
  if (domain == Domain::Frequency) {
    L.tau_lo = opt.bounds.tau_min.value_or(1e-6 / x_hi);
    L.tau_hi = opt.bounds.tau_max.value_or(1e6 / x_lo);
  } else {
    L.tau_lo = opt.bounds.tau_min.value_or(1e-6 * x_lo);
    L.tau_hi = opt.bounds.tau_max.value_or(1e6 * x_hi);
  }
  if (!(L.tau_lo > 0.0 && L.tau_lo < L.tau_hi)) throw DomainError("tau bounds must satisfy 0 < min < max");
  int k = 0;
  if (fits_alpha(kind)) L.ia = k++;
  if (fits_beta(kind)) L.ib = k++;
  L.itau = k++;
  if (domain == Domain::Frequency) {
    L.ie0 = k++;
    L.iei = k++;
  }
  L.n = k;
  return L;
}

struct Problem {
  Layout L;
  std::vector<double> x;     // omega or t
  std::vector<double> y;     // stacked observations
  std::vector<double> w;     // per-residual weights
  double y_norm = 0.0;

  std::size_t m() const { return y.size(); }

  Vec residuals(const Vec& p) const {
    const ModelSpec spec = L.spec_of(p);
    validate(spec);
    Vec r(m());
    if (L.domain == Domain::Frequency) {
      const PermittivityScale sc = L.scale_of(p);
      auto vals = parallel_map(2 * x.size(), [&](std::size_t j) {
        Permittivity e = permittivity(spec, sc, x[j / 2]);
        return j % 2 == 0 ? e.eps_re : e.eps_im;
      });
      for (std::size_t j = 0; j < m(); ++j) r[j] = w[j] * (vals[j] - y[j]);
    } else {
      auto vals = parallel_map(x.size(), [&](std::size_t i) { return relaxation(spec, x[i]); });
      for (std::size_t j = 0; j < m(); ++j) r[j] = w[j] * (vals[j] - y[j]);
    }
    for (std::size_t j = 0; j < m(); ++j)
      if (!std::isfinite(r[j])) throw DomainError("non-finite model value during fit");
    return r;
  }

  // Central differences with one Richardson step.
  Mat jacobian(const Vec& p) const {
    Mat J(m(), L.n);
    for (int i = 0; i < L.n; ++i) {
      const double h = 1e-3 * std::max(1.0, std::fabs(p[i]));
      auto diff = [&](double hh) {
        Vec pp = p, pm = p;
        pp[i] += hh;
        pm[i] -= hh;
        return Vec((residuals(pp) - residuals(pm)) / (2.0 * hh));
      };
      J.col(i) = (4.0 * diff(0.5 * h) - diff(h)) / 3.0;
    }
    return J;
  }
};

// Infinity norm of the gradient of |r|^2 / (2 |y|^2), the objective measured
// relative to the data. This is the reported gradient norm.
double objective_gradient(const Mat& J, const Vec& r, double y_norm) {
  const double y2 = std::max(y_norm * y_norm, 1e-300);
  return (J.transpose() * r).cwiseAbs().maxCoeff() / y2;
}

// max_i cos(J_i, r): scale-free stationarity test for nonzero-residual problems.
double gradient_cosine(const Mat& J, const Vec& r) {
  const Vec g = J.transpose() * r;
  const double rn = r.norm();
  double worst = 0.0;
  for (int i = 0; i < J.cols(); ++i) {
    const double cn = J.col(i).norm();
    if (cn > 0.0 && rn > 0.0) worst = std::max(worst, std::fabs(g[i]) / (cn * rn));
  }
  return worst;
}

// Slope of log|y| against log x by least squares over [lo, hi).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y, std::size_t lo,
                    std::size_t hi) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = lo; i < hi; ++i) {
    if (!(y[i] > 0.0)) continue;
    const double a = std::log(x[i]), b = std::log(y[i]);
    sx += a;
    sy += b;
    sxx += a * a;
    sxy += a * b;
    ++n;
  }
  if (n < 2) return 0.0;
  const double den = n * sxx - sx * sx;
  return den > 0.0 ? (n * sxy - sx * sy) / den : 0.0;
}

struct Start {
  double alpha = 0.8, beta = 0.8, tau = 1.0;
};

Start heuristic_start(const Problem& P) {
  Start s;
  const auto& x = P.x;
  const std::size_t N = x.size(), edge = std::max<std::size_t>(3, N / 5);
  if (P.L.domain == Domain::Frequency) {
    std::vector<double> im(N);
    for (std::size_t i = 0; i < N; ++i) im[i] = P.y[2 * i + 1];
    const std::size_t peak = std::max_element(im.begin(), im.end()) - im.begin();
    s.tau = 1.0 / x[peak];
    const double lo = loglog_slope(x, im, 0, std::min(edge, N));
    const double hi = -loglog_slope(x, im, N - std::min(edge, N), N);
    switch (P.L.kind) {
      case ModelKind::HN:
        s.alpha = lo;
        break;
      case ModelKind::JWS:
        s.alpha = hi;
        break;
      default:
        s.alpha = 0.5 * (lo + hi);
    }
  } else {
    std::size_t i = 0;
    const double target = std::exp(-1.0);
    while (i < N && P.y[i] > target) ++i;
    if (i == 0)
      s.tau = x[0] > 0.0 ? x[0] : x[std::min<std::size_t>(1, N - 1)];
    else if (i == N)
      s.tau = x[N - 1];
    else
      s.tau = x[i - 1] > 0.0 ? std::sqrt(x[i - 1] * x[i]) : x[i];
    std::vector<double> xs, ls;
    for (std::size_t j = 0; j < N; ++j)
      if (x[j] > 0.0 && P.y[j] > 0.05 && P.y[j] < 0.95) {
        xs.push_back(x[j]);
        ls.push_back(-std::log(P.y[j]));
      }
    s.alpha = loglog_slope(xs, ls, 0, xs.size());
  }
  s.alpha = std::clamp(std::isfinite(s.alpha) ? s.alpha : 0.8, 0.1, 0.99);
  s.tau = std::clamp(s.tau, P.L.tau_lo * 10.0, P.L.tau_hi / 10.0);
  return s;
}

Vec encode(const Problem& P, const Start& s, const std::optional<PermittivityScale>& scale) {
  const Layout& L = P.L;
  Vec p = Vec::Zero(L.n);
  p[L.itau] = std::log(std::clamp(s.tau, L.tau_lo, L.tau_hi));
  L.set_alpha(p, s.alpha);
  L.set_beta(p, s.beta);
  if (L.ie0 >= 0) {
    if (scale) {
      p[L.ie0] = scale->eps_static;
      p[L.iei] = scale->eps_inf;
    } else {
      // eps_inf and Delta by linear least squares at the initial shape.
      const ModelSpec spec = L.spec_of(p);
      Mat A(P.m(), 2);
      Vec b(P.m());
      for (std::size_t i = 0; i < P.x.size(); ++i) {
        std::complex<double> f = spectral(spec, P.x[i] * spec.tau);
        A(2 * i, 0) = P.w[2 * i];
        A(2 * i, 1) = P.w[2 * i] * f.real();
        A(2 * i + 1, 0) = 0.0;
        A(2 * i + 1, 1) = P.w[2 * i + 1] * -f.imag();
        b[2 * i] = P.w[2 * i] * P.y[2 * i];
        b[2 * i + 1] = P.w[2 * i + 1] * P.y[2 * i + 1];
      }
      Vec c = A.colPivHouseholderQr().solve(b);
      p[L.iei] = c[0];
      p[L.ie0] = c[0] + c[1];
    }
  }
  return L.project(p);
}

struct LmOutcome {
  Vec p;
  Vec r;
  Mat J;
  int iterations = 0;
  bool converged = false;
  double gradient = 0.0;
};

LmOutcome levenberg_marquardt(const Problem& P, Vec p, const FitOptions& opt) {
  LmOutcome out;
  Vec r = P.residuals(p);
  double cost = r.squaredNorm();
  double lambda = -1.0;
  Mat J;
  // Zero-residual problems reach the round-off floor of the data, where the
  // cosine test is meaningless.
  const double exact_floor = 1e-12 * P.y_norm;
  auto stationary = [&](const Mat& Jc, const Vec& rc) {
    out.gradient = objective_gradient(Jc, rc, P.y_norm);
    const bool flat = rc.norm() <= exact_floor || gradient_cosine(Jc, rc) < opt.gradient_tol;
    return flat && out.gradient < opt.gradient_tol;
  };
  int iter = 0;
  bool done = false;
  while (!done) {
    J = P.jacobian(p);
    if (!J.allFinite()) throw DegenerateJacobian("non-finite Jacobian");
    if (!(J.norm() > 0.0)) throw DegenerateJacobian("no parameter affects the residual");
    if (stationary(J, r)) {
      out.converged = true;
      break;
    }
    if (iter >= opt.max_iterations) break;
    ++iter;
    const Vec g = J.transpose() * r;
    const Mat A = J.transpose() * J;
    const double dmax = A.diagonal().maxCoeff();
    if (lambda < 0.0) lambda = 1e-3 * dmax;
    bool accepted = false;
    for (int tries = 0; tries < 60 && !accepted; ++tries) {
      Mat M = A;
      for (int i = 0; i < M.rows(); ++i) M(i, i) += lambda * std::max(A(i, i), 1e-12 * dmax);
      const Vec delta = M.ldlt().solve(-g);
      if (!delta.allFinite()) {
        lambda *= 4.0;
        continue;
      }
      const Vec pn = P.L.project(p + delta);
      Vec rn;
      double cn = std::numeric_limits<double>::infinity();
      try {
        rn = P.residuals(pn);
        cn = rn.squaredNorm();
      } catch (const std::exception&) {
      }
      if (cn < cost) {
        const double step = (pn - p).norm();
        p = pn;
        r = rn;
        cost = cn;
        lambda = std::max(lambda / 3.0, 1e-15 * dmax);
        accepted = true;
        if (step < opt.step_tol * (p.norm() + opt.step_tol)) done = true;
      } else {
        lambda *= 4.0;
      }
    }
    if (!accepted) done = true;
    if (done) {
      J = P.jacobian(p);
      out.converged = stationary(J, r);
    }
  }
  out.p = p;
  out.r = r;
  out.J = J;
  out.iterations = iter;
  return out;
}

Problem make_problem(const Dataset& data, ModelKind kind, const FitOptions& opt) {
  Problem P;
  if (auto* s = std::get_if<SpectrumDataset>(&data)) {
    if (kind == ModelKind::KWW) throw DomainError("KWW is fitted in the time domain only");
    if (s->size() < 5) throw DomainError("fitting needs at least 5 data points");
    P.L = make_layout(kind, Domain::Frequency, opt, s->omega.front(), s->omega.back());
    P.x = s->omega;
    for (std::size_t i = 0; i < s->size(); ++i) {
      P.y.push_back(s->eps_re[i]);
      P.y.push_back(s->eps_im[i]);
      const double wi = s->weights.empty() ? 1.0 : s->weights[i];
      P.w.push_back(wi);
      P.w.push_back(wi);
    }
  } else {
    const auto& d = std::get<TimeDataset>(data);
    if (d.size() < 5) throw DomainError("fitting needs at least 5 data points");
    const double lo = d.t.front() > 0.0 ? d.t.front() : d.t[1];
    P.L = make_layout(kind, Domain::Time, opt, lo, d.t.back());
    P.x = d.t;
    P.y = d.n;
    P.w = d.weights.empty() ? std::vector<double>(d.size(), 1.0) : d.weights;
  }
  double s2 = 0.0;
  for (std::size_t j = 0; j < P.m(); ++j) s2 += P.w[j] * P.w[j] * P.y[j] * P.y[j];
  P.y_norm = std::sqrt(s2);
  return P;
}

double aicc(double rss, double y_norm, int m, int k) {
  // Residual sums below round-off of the data carry no information; clamp them
  // so exact fits tie and the parameter penalty decides.
  const double floor = m * std::pow(1e-9 * y_norm / std::sqrt(static_cast<double>(m)), 2);
  const double r = std::max(rss, std::max(floor, std::numeric_limits<double>::min()));
  if (m - k - 1 <= 0) return std::numeric_limits<double>::infinity();
  return m * std::log(r / m) + 2.0 * k + 2.0 * k * (k + 1.0) / (m - k - 1.0);
}

}  // namespace

std::vector<ModelKind> applicable_kinds(Domain domain) {
  std::vector<ModelKind> out{ModelKind::Debye, ModelKind::CC, ModelKind::CD,
                             ModelKind::MCD,   ModelKind::HN, ModelKind::JWS};
  if (domain == Domain::Time) out.push_back(ModelKind::KWW);
  return out;
}

FitResult fit(const Dataset& data, ModelKind kind, const FitOptions& opt) {
  Problem P = make_problem(data, kind, opt);
  const Layout& L = P.L;

  std::vector<Vec> starts;
  std::optional<PermittivityScale> init_scale;
  if (opt.init) {
    Start s{opt.init->alpha, opt.init->beta, opt.init->tau};
    starts.push_back(encode(P, s, std::nullopt));
  } else {
    Start s = heuristic_start(P);
    starts.push_back(encode(P, s, std::nullopt));
    if (L.ib >= 0) {
      // A second, strongly asymmetric start guards against the symmetric basin.
      Start s2 = s;
      s2.beta = 0.4;
      starts.push_back(encode(P, s2, std::nullopt));
    }
  }

  std::optional<LmOutcome> best;
  for (const Vec& p0 : starts) {
    LmOutcome o = levenberg_marquardt(P, p0, opt);
    if (!best || o.r.squaredNorm() < best->r.squaredNorm()) best = std::move(o);
  }

  FitResult res;
  res.spec = pinned(L.spec_of(best->p));
  if (L.ie0 >= 0) res.scale = L.scale_of(best->p);
  res.residual_norm = best->r.norm();
  res.gradient_norm = best->gradient;
  res.iterations = best->iterations;
  res.converged = best->converged;
  res.parameter_count = L.n;
  res.residual_count = static_cast<int>(P.m());
  const double rss = best->r.squaredNorm();
  res.score = aicc(rss, P.y_norm, res.residual_count, res.parameter_count);

  // Gauss-Newton covariance, mapped to natural parameters by the delta method.
  const int dof = std::max(1, res.residual_count - L.n);
  const Mat A = best->J.transpose() * best->J;
  const Mat cov = (rss / dof) * A.completeOrthogonalDecomposition().pseudoInverse();
  Mat D(L.n, L.n);
  const Vec nat0 = L.natural(best->p);
  for (int i = 0; i < L.n; ++i) {
    const double h = 1e-7 * std::max(1.0, std::fabs(best->p[i]));
    Vec pp = best->p, pm = best->p;
    pp[i] += h;
    pm[i] -= h;
    D.col(i) = (L.natural(pp) - L.natural(pm)) / (2.0 * h);
  }
  const Mat cn = D * cov * D.transpose();
  const auto names = L.natural_names();
  for (int i = 0; i < L.n; ++i) res.param_stderr[names[i]] = std::sqrt(std::max(0.0, cn(i, i)));
  return res;
}

std::vector<RankedFit> compare(const Dataset& data, const std::vector<ModelKind>& candidates,
                               const FitOptions& opt) {
  if (candidates.empty()) throw DomainError("compare needs at least one candidate");
  std::vector<RankedFit> out;
  for (ModelKind k : candidates) {
    FitResult r = fit(data, k, opt);
    out.push_back({k, r.score, std::move(r)});
  }
  std::stable_sort(out.begin(), out.end(), [](const RankedFit& a, const RankedFit& b) {
    const double tie = 1e-9 * std::max({1.0, std::fabs(a.score), std::fabs(b.score)});
    if (std::fabs(a.score - b.score) > tie) return a.score < b.score;
    if (a.result.parameter_count != b.result.parameter_count)
      return a.result.parameter_count < b.result.parameter_count;
    return to_string(a.kind) < to_string(b.kind);
  });
  return out;
}

FitResult fit_auto(const Dataset& data, const FitOptions& opt) {
  const Domain d = std::holds_alternative<SpectrumDataset>(data) ? Domain::Frequency : Domain::Time;
  return compare(data, applicable_kinds(d), opt).front().result;
}

std::string to_json(const FitResult& r, int indent) {
  nlohmann::ordered_json j;
  j["model"] = to_string(r.spec.kind);
  j["alpha"] = r.spec.alpha;
  if (r.spec.kind == ModelKind::KWW)
    j["beta"] = nullptr;
  else
    j["beta"] = r.spec.beta;
  j["tau"] = r.spec.tau;
  if (r.scale) {
    j["eps_static"] = r.scale->eps_static;
    j["eps_inf"] = r.scale->eps_inf;
  } else {
    j["eps_static"] = nullptr;
    j["eps_inf"] = nullptr;
  }
  j["residual_norm"] = r.residual_norm;
  j["converged"] = r.converged;
  j["iterations"] = r.iterations;
  nlohmann::ordered_json se = nlohmann::ordered_json::object();
  for (const char* k : {"alpha", "beta", "tau", "eps_static", "eps_inf"}) {
    auto it = r.param_stderr.find(k);
    if (it != r.param_stderr.end()) se[k] = it->second;
  }
  j["stderr"] = se;
  return j.dump(indent);
}

}  // namespace relaxkit
