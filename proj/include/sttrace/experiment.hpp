#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sttrace/postproc.hpp"

namespace sttrace {

/// One convergence study. Parsed from flat `key = value` text.
struct ExperimentConfig {
  std::string scene = "moving_circle";
  MethodParams params;
  bool diagonal = true;
  std::vector<int> levels{0, 1, 2, 3};  // diagonal mode
  std::vector<int> levels_s, levels_q;  // grid mode
  std::optional<double> h_init, dt_init, T;
  std::optional<Rectangle> domain;
  std::string out;  // output directory; empty disables CSV files
  int threads = 0;  // 0 keeps the OpenMP default
  bool check_beta = true;  // beta-independence check on w = 0 scenes

  /// Throws ConfigError on inconsistent settings.
  void validate() const;
};

/// Parses the config text. Unknown keys and malformed values throw ConfigError.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);

/// Scene-specific default initial mesh and step sizes.
double default_h_init(const std::string& scene);
double default_dt_init(const std::string& scene);

/// Scene with the config overrides (domain, T) applied.
AnalyticScene configured_scene(const ExperimentConfig& cfg);

struct LevelRow {
  int ls = 0, lq = 0;
  double h = 0.0, dt = 0.0;
  bool completed = false;
  std::string error;
  ErrorReport report;
  std::optional<double> err_energy, err_surface_energy, err_linf_l2, e_mass;
  std::optional<double> eoc_s, eoc_q, eoc_qs;
  double seconds = 0.0;
  int max_fallbacks = 0;
};

struct ConvergenceReport {
  bool diagonal = true;
  std::vector<LevelRow> rows;
  std::optional<bool> beta_independent;
  double beta_defect = 0.0;

  bool all_completed() const;
  /// Error used for the EOC columns: energy, else surface energy, else e_mass.
  static std::optional<double> eoc_quantity(const LevelRow& row);
};

extern const char* const kCsvHeader;

/// Marches every requested level and fills errors and EOCs. Failures are
/// recorded per row. When cfg.out is set, writes convergence.csv and
/// mass_surface.csv there (also after failures).
ConvergenceReport run_experiment(const ExperimentConfig& cfg, std::ostream* log = nullptr);

void write_csv(const ConvergenceReport& report, std::ostream& out);
/// Per level: i_mass and i_surf at every t_n.
void write_mass_csv(const ConvergenceReport& report, double T, std::ostream& out);
void print_table(const ConvergenceReport& report, std::ostream& out);

}  // namespace sttrace
