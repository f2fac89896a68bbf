#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace relaxkit {

struct CheckResult {
  std::string suite;
  std::string name;
  double max_error = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string detail;
};

struct VerifyOptions {
  // Replaces the tolerance of every check when set.
  std::optional<double> tolerance;
  // Per-check replacements keyed by "suite/name"; they win over `tolerance`.
  std::map<std::string, double> overrides;
};

// all, sonine, duality, pdf, subordination, cm, asymptotics, figures,
// reductions, transforms.
const std::vector<std::string>& suite_names();
bool is_suite(const std::string& name);

std::vector<CheckResult> run_suite(const std::string& suite, const VerifyOptions& opt = {});
bool all_passed(const std::vector<CheckResult>& results);
std::string report_json(const std::vector<CheckResult>& results, int indent = 2);

struct FigureTable {
  std::string name;     // fig1, fig2, fig3, fig4a, fig4b, fig5a, fig5b, fig6
  std::string abscissa;  // column header of the first column
  std::vector<std::string> columns;
  std::vector<double> x;
  std::vector<std::vector<double>> values;  // values[column][row]
};

std::vector<FigureTable> figure_tables(int points = 200);
std::string to_csv(const FigureTable& table);

}  // namespace relaxkit
