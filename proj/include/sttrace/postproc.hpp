#pragma once

#include <optional>
#include <vector>

#include "sttrace/solver.hpp"

namespace sttrace {

enum class ExtensionMode { ClosestPoint, Analytic };

/// Squared parts of the energy norm error plus mass/area series.
struct ErrorReport {
  int num_slabs = 0;
  bool has_exact = false;
  ExtensionMode extension = ExtensionMode::Analytic;
  double end_sq = 0.0;   // max_n ||e_-^n||^2 on Gamma_h^n(t_n)
  double jump_sq = 0.0;  // sum of squared jumps
  double l2_sq = 0.0;    // ||e||^2 on S_h
  double grad_sq = 0.0;  // ||grad_Gamma_h e||^2 on S_h
  double xi_sq = 0.0;    // xi ||n_h . grad e||^2 on the deformed prisms
  std::vector<double> jumps;  // per slab squared jump norm
  std::vector<double> i_mass, i_surf;  // n = 0..N
  double e_mass = 0.0;

  /// Energy norm error; absent without exact solution or closest-point map.
  std::optional<double> energy() const;
  /// Energy error without the bulk normal-derivative term.
  std::optional<double> surface_energy() const;
  std::optional<double> linf_l2() const;
};

/// Streams slabs in order (as a march observer) and accumulates all error
/// measures with quadrature one order above assembly.
class ErrorAccumulator {
 public:
  ErrorAccumulator(const AnalyticScene& scene, const MethodParams& params,
                   std::optional<ExtensionMode> extension = std::nullopt);

  void add_slab(const SlabRecord& cur, const SlabRecord* prev, const TraceFn& prev_trace);
  SlabObserver observer();
  const ErrorReport& report() const { return report_; }

 private:
  struct Extended {
    double value;
    Vec2 grad;
  };
  Extended exact(const Vec2& y, double t) const;

  const AnalyticScene* scene_;
  MethodParams params_;
  ErrorReport report_;
};

/// Post-processing of a retained solution (replays ErrorAccumulator).
ErrorReport evaluate_errors(const SpaceTimeSolution& sol, const AnalyticScene& scene,
                            const MethodParams& params,
                            std::optional<ExtensionMode> extension = std::nullopt);
std::optional<double> energy_error(const SpaceTimeSolution& sol, const AnalyticScene& scene,
                                   const MethodParams& params);
std::optional<double> linf_l2_error(const SpaceTimeSolution& sol, const AnalyticScene& scene,
                                    const MethodParams& params);

struct MassSeries {
  std::vector<double> i_mass, i_surf;
  double e_mass = 0.0;
};
MassSeries mass_area_series(const SpaceTimeSolution& sol, const AnalyticScene& scene,
                            const MethodParams& params);

/// log2(e_l / e_{l+1}) for consecutive entries; absent when either error is
/// absent or nonpositive.
std::vector<std::optional<double>> compute_eoc(const std::vector<std::optional<double>>& errors);
std::optional<double> eoc(std::optional<double> coarse, std::optional<double> fine);

}  // namespace sttrace
