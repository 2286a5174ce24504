#pragma once

#include <string>
#include <vector>

#include "sttrace/postproc.hpp"

namespace sttrace {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Property suites: "invariants" or "oracles". Throws ConfigError otherwise.
std::vector<CheckResult> run_suite(const std::string& suite);
std::vector<CheckResult> invariant_suite();
std::vector<CheckResult> oracle_suite();

/// max_ij |A_beta - A_0| / max |A_0| over beta in {1/2, 1} for slab `slab`.
double beta_independence_defect(const AnalyticScene& scene, const MethodParams& params,
                                const Triangulation& mesh, const TimeGrid& grid, int slab = 1);

/// Relative gap between the iterated integral of g over Gamma_lin(t), t in
/// I_n (surface quadrature), and the surface integral of g / sqrt(1 + V_h^2)
/// over S_lin computed on Richardson-extrapolated bilinear space-time strips
/// (k_g = 1).
double transformation_identity_defect(const AnalyticScene& scene, const Triangulation& mesh,
                                      const TimeGrid& grid, int slab);

/// max |phi(Theta(x, t), t)| over sampled points of Gamma_lin at five
/// off-node times of slab 1, per level l = 0..levels-1 (phi must be a
/// signed distance).
std::vector<double> geometry_errors(const AnalyticScene& scene, int kg, double h_init,
                                    double dt_init, int levels);

/// sqrt(xi ||n_h . grad u^e||^2) over the deformed prisms of slab 1 for the
/// closest-point extension of the exact solution, per level.
std::vector<double> stabilization_consistency(const AnalyticScene& scene, int k, double h_init,
                                              double dt_init, int levels);

/// Relative error of the surface rule with L temporal points against a
/// highly resolved one, for a smooth integrand, per entry of Ls.
std::vector<double> quadrature_L_errors(const AnalyticScene& scene, const Triangulation& mesh,
                                        const TimeGrid& grid, int slab, const std::vector<int>& Ls);

/// Largest |c_i - c| over all slab coefficients of a w = 0, f = 0 run with
/// u0 = c.
double constant_solution_defect(double c, int k, int levels_below = 0);

}  // namespace sttrace
