#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "sttrace/cutgeom.hpp"
#include "sttrace/deform.hpp"

namespace sttrace {

/// Products of degree-k_s triangle Lagrange functions and degree-k_q temporal
/// Lagrange functions. Local index i = a * (k_q + 1) + m.
class TensorBasis {
 public:
  TensorBasis(int ks, int kq);

  int ks() const { return spatial_.order(); }
  int kq() const { return temporal_.degree(); }
  int size() const { return spatial_.size() * temporal_.size(); }
  int spatial_size() const { return spatial_.size(); }
  int temporal_size() const { return temporal_.size(); }
  const TriangleLagrange& spatial() const { return spatial_; }
  const Lagrange1D& temporal() const { return temporal_; }

  /// Values and reference gradients (d/dxi, d/deta, d/ds) at (ref, s).
  void eval(const Vec2& ref, double s, std::span<double> values, std::span<Vec3> grads) const;

 private:
  TriangleLagrange spatial_;
  Lagrange1D temporal_;
};

/// Basis values with physical (undeformed) space and time derivatives.
struct BasisValues {
  std::vector<double> v;
  std::vector<Vec2> gx;
  std::vector<double> gt;
};

/// Degrees of freedom of V_h^{k_s,k_q} restricted to the active prisms of a
/// slab. Spatial nodes are numbered in order of first appearance.
class DofMap {
 public:
  DofMap(const Triangulation& mesh, const CutTopologySlab& topo,
         std::shared_ptr<const LagrangeNodes> nodes, int kq);

  int slab() const { return slab_; }
  int num_dofs() const { return num_spatial_ * nt_; }
  int num_spatial() const { return num_spatial_; }
  int num_elements() const { return static_cast<int>(elements_.size()); }
  int ks() const { return nodes_->order(); }
  int kq() const { return nt_ - 1; }
  double t0() const { return t0_; }
  double t1() const { return t1_; }
  const TensorBasis& basis() const { return basis_; }
  const LagrangeNodes& nodes() const { return *nodes_; }
  std::shared_ptr<const LagrangeNodes> shared_nodes() const { return nodes_; }
  const Triangulation& mesh() const { return *mesh_; }

  int element_triangle(int e) const { return elements_[e]; }
  /// Compact spatial index of global Lagrange node p, or -1.
  int spatial_index(int node) const { return spatial_of_node_[node]; }
  /// Global Lagrange node of compact spatial index.
  int spatial_node(int sid) const { return node_of_spatial_[sid]; }
  /// Dofs of active element e in local basis order.
  void element_dofs(int e, std::span<int> dofs) const;
  int dof(int sid, int m) const { return sid * nt_ + m; }

  /// Basis of element e at physical (x, t).
  void eval_basis(int e, const Vec2& x, double t, BasisValues& out) const;

 private:
  const Triangulation* mesh_;
  std::shared_ptr<const LagrangeNodes> nodes_;
  TensorBasis basis_;
  int slab_;
  double t0_, t1_;
  int nt_;
  std::vector<int> elements_;
  std::vector<int> spatial_of_node_;
  std::vector<int> node_of_spatial_;
  int num_spatial_ = 0;
};

struct FEFunction {
  int slab = 0;
  Eigen::VectorXd coeffs;
};

struct FEValue {
  double value = 0.0;
  Vec2 grad = Vec2::Zero();  // spatial gradient (deformed if a deformation is given)
  double dt = 0.0;           // time derivative (deformed if a deformation is given)
};

/// u_h on active element e at reference-configuration point (x, t). With a
/// deformation the gradient is that of u_h o Theta^{-1} at Theta(x, t).
FEValue eval_fe(const FEFunction& fn, const DofMap& dofmap, int e, const Vec2& x, double t,
                const SpaceTimeDeformation* def = nullptr);

/// Locates x among the active elements and evaluates there.
/// Throws LookupError outside the active region.
FEValue eval_fe_at(const FEFunction& fn, const DofMap& dofmap, const CutTopologySlab& topo,
                   const Vec2& x, double t);

/// Nodal interpolation of g(x, t) into the slab space.
FEFunction interpolate_fe(const DofMap& dofmap, const std::function<double(const Vec2&, double)>& g);

}  // namespace sttrace
