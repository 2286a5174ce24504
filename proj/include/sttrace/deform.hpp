#pragma once

#include <vector>

#include "sttrace/cutgeom.hpp"
#include "sttrace/levelset.hpp"

namespace sttrace {

/// Spatial deformation Theta_s at (x, t) on one element.
struct DeformationEval {
  Vec2 image;
  Mat2 D;        // d Theta_s / d x
  Vec2 dtheta;   // d Theta_s / d t
};

/// Space-time mesh deformation of one slab:
/// Theta(x, t) = (x + sum_m X_m(t) d_m(x), t), with d_m continuous degree-k_gs
/// displacement fields living on the active elements (zero elsewhere).
class SpaceTimeDeformation {
 public:
  /// Identity deformation of a slab.
  explicit SpaceTimeDeformation(const DiscreteLevelSet& ls);
  SpaceTimeDeformation(const DiscreteLevelSet& ls, std::vector<std::vector<Vec2>> displacement,
                       int fallback_elements);

  bool is_identity() const { return disp_.empty(); }
  int slab() const { return slab_; }
  int num_time_nodes() const { return time_basis_.size(); }
  /// Elements reset to zero displacement by the inversion check.
  int fallback_elements() const { return fallback_; }
  const Triangulation& mesh() const { return *mesh_; }

  /// Nodal displacement at temporal node m (zero for identity).
  Vec2 nodal_displacement(int m, int node) const {
    return is_identity() ? Vec2::Zero() : disp_[m][node];
  }

  DeformationEval eval(int K, const Vec2& x, double t) const;
  Vec2 image(int K, const Vec2& x, double t) const { return eval(K, x, t).image; }

 private:
  const Triangulation* mesh_;
  std::shared_ptr<const LagrangeNodes> nodes_;
  int slab_;
  double t0_, t1_;
  Lagrange1D time_basis_;
  std::vector<std::vector<Vec2>> disp_;  // [m][node]
  int fallback_ = 0;
};

/// Isoparametric lift of Gamma_lin onto the zero level of phi_h at every
/// temporal node; identity for k_gs = 1.
SpaceTimeDeformation build_deformation(const DiscreteLevelSet& ls, const CutTopologySlab& topo);

/// Geometry of the mapped space-time surface at a reference point.
struct MappedPointData {
  int tri;
  Vec2 x;
  double t;
  Vec2 image;
  Mat2 Ds;       // spatial Jacobian of Theta_s
  Vec2 dtheta;   // time derivative of Theta_s
  Mat3 Dst;      // space-time Jacobian of Theta
  Mat2 DsInvT;
  double det;
  Vec2 grad_lin;  // grad phi_hat
  double dt_lin;  // d_t phi_hat
  Vec2 n_lin;
  Vec3 n_slin;
  Vec2 n_h;
  Vec3 n_sh;
  double Vh;
  double nanson;  // |Ds^{-T} n_lin|
  double alpha;
  double J_alpha;
};

MappedPointData map_point(const DiscreteLevelSet& ls, const SpaceTimeDeformation& def,
                          const AlphaField& alpha, int K, const Vec2& x, double t);

/// Discrete normal velocity at Theta(x, t).
double eval_Vh(const DiscreteLevelSet& ls, const SpaceTimeDeformation& def, int K, const Vec2& x,
               double t);
/// alpha_h at Theta(x, t).
double eval_alpha(const DiscreteLevelSet& ls, const SpaceTimeDeformation& def,
                  const AlphaField& alpha, int K, const Vec2& x, double t);

struct ReferencePoint {
  int tri;
  Vec2 x;
};

/// Solves Theta_s(x, t) = y over the active elements of `topo`.
/// Throws InversionError when y is not in the deformed active region.
ReferencePoint invert_map(const SpaceTimeDeformation& def, const CutTopologySlab& topo,
                          const Vec2& y, double t, int hint = -1);

}  // namespace sttrace
