#pragma once

#include <array>
#include <memory>
#include <span>
#include <vector>

#include "sttrace/mesh.hpp"
#include "sttrace/scene.hpp"

namespace sttrace {

/// Space-time nodal interpolant phi_h of a level set on one slab, plus its
/// spatially piecewise-linear restriction phi_hat (vertex values only).
///
/// Values are stored per global Lagrange node of degree k_gs and per
/// temporal node; the first num_vertices nodes are the mesh vertices, so
/// phi_hat needs no separate storage.
class DiscreteLevelSet {
 public:
  DiscreteLevelSet(const Triangulation& mesh, std::shared_ptr<const LagrangeNodes> nodes, int slab,
                   std::array<double, 2> interval, int kgq, std::vector<double> values);

  const Triangulation& mesh() const { return *mesh_; }
  const LagrangeNodes& nodes() const { return *nodes_; }
  std::shared_ptr<const LagrangeNodes> shared_nodes() const { return nodes_; }
  int slab() const { return slab_; }
  int kgs() const { return nodes_->order(); }
  int kgq() const { return kgq_; }
  double t0() const { return t0_; }
  double t1() const { return t1_; }
  double dt() const { return t1_ - t0_; }
  /// Slab-local time s = (t - t0)/dt.
  double local_time(double t) const { return (t - t0_) / (t1_ - t0_); }

  const Lagrange1D& time_basis() const { return time_basis_; }
  int num_time_nodes() const { return time_basis_.size(); }
  double time_node(int m) const;

  double nodal_value(int node, int m) const { return values_[node * num_time_nodes() + m]; }
  std::span<const double> node_series(int node) const {
    return {values_.data() + static_cast<std::size_t>(node) * num_time_nodes(),
            static_cast<std::size_t>(num_time_nodes())};
  }
  /// max |phi_hat| over all vertex coefficients.
  double lin_scale() const { return lin_scale_; }
  /// Absolute perturbation applied to exact zeros of phi_hat.
  double zero_shift() const { return 1e-12 * lin_scale_; }

  /// phi_h on triangle K (its polynomial, also usable slightly outside K).
  double eval(int K, const Vec2& x, double t) const;
  void eval_grad(int K, const Vec2& x, double t, double& value, Vec2& grad, double& dphidt) const;

  double vertex_value(int v, double t) const;
  /// phi_hat at the corners of K at time t, exact zeros shifted to +zero_shift().
  std::array<double, 3> corner_values(int K, double t) const;
  /// phi_hat on K: value, spatial gradient (constant on K) and time derivative.
  void eval_lin(int K, const Vec2& x, double t, double& value, Vec2& grad, double& dphidt) const;
  Vec2 grad_lin(int K, double t) const;

 private:
  const Triangulation* mesh_;
  std::shared_ptr<const LagrangeNodes> nodes_;
  int slab_;
  double t0_, t1_;
  int kgq_;
  Lagrange1D time_basis_;
  std::vector<double> values_;
  double lin_scale_ = 0.0;
};

/// Nodal interpolation of scene.phi at the degree-k_gs Lagrange nodes times
/// the Gauss-Lobatto temporal nodes of slab n.
DiscreteLevelSet interpolate_levelset(const AnalyticScene& scene, const Triangulation& mesh,
                                      const TimeGrid& grid, int n, int kgs, int kgq);
DiscreteLevelSet interpolate_levelset(const AnalyticScene& scene, const Triangulation& mesh,
                                      std::shared_ptr<const LagrangeNodes> nodes,
                                      const TimeGrid& grid, int n, int kgq);

struct LinearNormals {
  Vec2 n_lin;
  Vec3 n_slin;
};

/// Spatial and space-time unit normals of phi_hat on K at (x, t).
LinearNormals eval_normals_lin(const DiscreteLevelSet& ls, int K, const Vec2& x, double t);

/// Arithmetic-mean averaging of element-wise nodal values into a continuous
/// FE field. `local` holds ncomp values per local node per element, in the
/// order of `elements`. Nodes not touched by any element stay zero.
struct OswaldField {
  std::vector<double> values;  // ncomp per global node
  std::vector<int> counts;     // number of contributing elements per node
};
OswaldField oswald_average(const LagrangeNodes& nodes, std::span<const int> elements, int ncomp,
                           std::span<const double> local);

/// Oswald-projected sqrt(1 + V~^2), V~ = -d_t phi~ / |grad phi~| with phi~ the
/// element-local interpolant of phi of one order higher in space and time.
class ImprovedAlpha {
 public:
  ImprovedAlpha(const AnalyticScene& scene, const DiscreteLevelSet& ls,
                std::span<const int> active);

  /// Polynomial of element K evaluated at (y, t); y may lie slightly outside K.
  double eval(int K, const Vec2& y, double t) const;
  double nodal_value(int node, int m) const { return field_.values[node * nt_ + m]; }
  int node_count(int node) const { return field_.counts[node]; }

 private:
  const DiscreteLevelSet* ls_;
  int nt_;
  OswaldField field_;
};

enum class AlphaMode { Simple, Improved };

/// The discrete alpha_h used in the bilinear form.
class AlphaField {
 public:
  AlphaField() = default;
  static AlphaField simple() { return AlphaField(); }
  static AlphaField improved(const AnalyticScene& scene, const DiscreteLevelSet& ls,
                             std::span<const int> active);

  AlphaMode mode() const { return improved_ ? AlphaMode::Improved : AlphaMode::Simple; }
  /// alpha_h at the image point y of K at time t, given the discrete V_h there.
  double eval(int K, const Vec2& y, double t, double Vh) const;

 private:
  std::shared_ptr<const ImprovedAlpha> improved_;
};

}  // namespace sttrace
