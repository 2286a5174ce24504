#pragma once

#include <array>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "sttrace/polynomial.hpp"

namespace sttrace {

/// Axis-aligned rectangle [xmin, xmax] x [ymin, ymax].
struct Rectangle {
  double xmin = -1.0, xmax = 1.0, ymin = -1.0, ymax = 1.0;
};

struct Edge {
  std::array<int, 2> v;    // v[0] < v[1]
  std::array<int, 2> tri;  // tri[1] == -1 on the domain boundary
};

/// Fixed 2D background triangulation. Immutable after construction.
///
/// Triangles are counter-clockwise. Local edge e of a triangle is the one
/// opposite local vertex e.
class Triangulation {
 public:
  Triangulation(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles);

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_triangles() const { return static_cast<int>(triangles_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }

  const std::vector<Vec2>& vertices() const { return vertices_; }
  const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
  const std::vector<Edge>& edges() const { return edges_; }

  const std::array<int, 3>& triangle(int t) const { return triangles_[t]; }
  const std::array<int, 3>& triangle_edges(int t) const { return tri_edges_[t]; }
  /// Neighbor across local edge e, -1 on the boundary.
  int neighbor(int t, int e) const;

  std::array<Vec2, 3> corners(int t) const;
  double signed_area(int t) const;
  /// Maximum edge length.
  double h() const { return h_; }

  /// Affine map of the reference triangle: x = v0 + J ref.
  Mat2 jacobian(int t) const { return jac_[t]; }
  Mat2 inverse_jacobian(int t) const { return inv_jac_[t]; }
  Vec2 to_reference(int t, const Vec2& x) const;
  Vec2 to_physical(int t, const Vec2& ref) const;
  std::array<double, 3> barycentric(int t, const Vec2& x) const;

  /// Walks from `hint` toward x through triangles accepted by `allowed`
  /// (all when empty). Falls back to a scan of the allowed triangles.
  /// Returns -1 when no allowed triangle contains x within `tol`
  /// (barycentric slack).
  int locate(const Vec2& x, int hint, const std::function<bool(int)>& allowed = {},
             double tol = 1e-10) const;

 private:
  std::vector<Vec2> vertices_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<Edge> edges_;
  std::vector<std::array<int, 3>> tri_edges_;
  std::vector<Mat2> jac_, inv_jac_;
  double h_ = 0.0;
};

/// Uniform time partition 0 = t_0 < ... < t_N = T. Slabs are numbered 1..N.
class TimeGrid {
 public:
  TimeGrid(double T, int N);

  int num_slabs() const { return N_; }
  double T() const { return T_; }
  double dt() const { return T_ / N_; }
  double node(int n) const { return T_ * n / N_; }
  /// I_n = [t_{n-1}, t_n], n = 1..N.
  std::array<double, 2> slab(int n) const { return {node(n - 1), node(n)}; }

 private:
  double T_;
  int N_;
};

/// Square cells of side h_init, each split along the (0,0)-(1,1) diagonal.
Triangulation build_structured_mesh(const Rectangle& domain, double h_init);

/// Red refinement: every triangle split into four congruent children.
Triangulation refine_uniform(const Triangulation& mesh);

/// dt = dt_init * 2^{-level}; throws ConfigError if T/dt is not integral.
TimeGrid build_time_grid(double T, double dt_init, int level);

/// Global numbering of the degree-k Lagrange nodes of a triangulation.
///
/// Numbering: vertices, then k-1 nodes per edge, then interior nodes per
/// triangle. Local node order follows TriangleLagrange(k).
class LagrangeNodes {
 public:
  LagrangeNodes(const Triangulation& mesh, int order);

  int order() const { return order_; }
  int size() const { return static_cast<int>(coords_.size()); }
  int nodes_per_element() const { return npe_; }
  std::span<const int> element_nodes(int t) const {
    return {elem_nodes_.data() + static_cast<std::size_t>(t) * npe_, static_cast<std::size_t>(npe_)};
  }
  const Vec2& coord(int node) const { return coords_[node]; }
  const TriangleLagrange& basis() const { return basis_; }

 private:
  int order_;
  int npe_;
  TriangleLagrange basis_;
  std::vector<int> elem_nodes_;
  std::vector<Vec2> coords_;
};

}  // namespace sttrace
