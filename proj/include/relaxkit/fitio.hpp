#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "relaxkit/models.hpp"

namespace relaxkit {

enum class Domain { Frequency, Time };

struct SpectrumDataset {
  std::vector<double> omega, eps_re, eps_im;
  std::vector<double> weights;  // empty means unit weights
  std::string meta;
  std::vector<std::string> warnings;
  std::size_t size() const { return omega.size(); }
};

struct TimeDataset {
  std::vector<double> t, n;
  std::vector<double> weights;
  std::string meta;
  std::vector<std::string> warnings;
  std::size_t size() const { return t.size(); }
};

using Dataset = std::variant<SpectrumDataset, TimeDataset>;

Dataset parse_csv(std::istream& in, Domain domain, const std::string& meta = "");
Dataset read_csv(const std::string& path, Domain domain);
void write_csv(std::ostream& out, const Dataset& data);

struct GridSpec {
  double start = 1e-2;
  double stop = 1e2;
  int points = 50;
  bool log = true;
};

void validate(const GridSpec& g);
// "start:stop:points[:log|:lin]"
GridSpec parse_grid(const std::string& text);
std::vector<double> grid_values(const GridSpec& g);

// Exact values times (1 + noise_rel N(0,1)) with a seeded 64-bit Mersenne twister.
SpectrumDataset synthesize_spectrum(const ModelSpec& spec, const PermittivityScale& scale,
                                    const std::vector<double>& omega, double noise_rel,
                                    std::uint64_t seed);
TimeDataset synthesize_relaxation(const ModelSpec& spec, const std::vector<double>& t,
                                  double noise_rel, std::uint64_t seed);

// Box on the natural parameters; tau bounds default to a range around the data.
struct FitBounds {
  double alpha_min = 1e-3, alpha_max = 1.0;
  double beta_min = 1e-3, beta_max = 1e3;
  std::optional<double> tau_min, tau_max;
};

struct FitOptions {
  std::optional<ModelSpec> init;
  FitBounds bounds;
  int max_iterations = 200;
  double gradient_tol = 1e-10;
  double step_tol = 1e-12;
  bool strict_experimental = false;
};

struct FitResult {
  ModelSpec spec;
  std::optional<PermittivityScale> scale;  // frequency fits only
  double residual_norm = 0.0;
  double gradient_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  int parameter_count = 0;
  int residual_count = 0;
  double score = 0.0;  // AICc
  std::map<std::string, double> param_stderr;
};

// Applicable kinds: every kernel-bearing kind for spectra, all seven for time data.
std::vector<ModelKind> applicable_kinds(Domain domain);

FitResult fit(const Dataset& data, ModelKind kind, const FitOptions& opt = {});

struct RankedFit {
  ModelKind kind;
  double score;
  FitResult result;
};

// Sorted by AICc; ties (within 1e-9) go to fewer parameters, then kind name.
std::vector<RankedFit> compare(const Dataset& data, const std::vector<ModelKind>& candidates,
                               const FitOptions& opt = {});
FitResult fit_auto(const Dataset& data, const FitOptions& opt = {});

std::string to_json(const FitResult& r, int indent = 2);

}  // namespace relaxkit
