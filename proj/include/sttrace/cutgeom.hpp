#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "sttrace/levelset.hpp"

namespace sttrace {

struct TimeWindow {
  double t0, t1;
  bool cut;  // vertex signs of phi_hat are mixed inside the window
};

/// Active triangles of one slab and their temporal breakpoints.
class CutTopologySlab {
 public:
  CutTopologySlab() = default;
  CutTopologySlab(int slab, std::array<double, 2> interval, int num_triangles);

  int slab() const { return slab_; }
  double t0() const { return t0_; }
  double t1() const { return t1_; }
  bool empty() const { return active_.empty(); }
  int size() const { return static_cast<int>(active_.size()); }

  /// Active triangle indices, ascending.
  const std::vector<int>& active() const { return active_; }
  /// Position of triangle K in active(), or -1.
  int local_index(int K) const { return local_[K]; }
  bool is_active(int K) const { return local_[K] >= 0; }
  /// Sorted breakpoints of active element e (first t0, last t1).
  const std::vector<double>& breakpoints(int e) const { return breakpoints_[e]; }
  const std::vector<TimeWindow>& windows(int e) const { return windows_[e]; }

  void add(int K, std::vector<double> breakpoints, std::vector<TimeWindow> windows);

 private:
  int slab_ = 0;
  double t0_ = 0.0, t1_ = 0.0;
  std::vector<int> active_;
  std::vector<int> local_;
  std::vector<std::vector<double>> breakpoints_;
  std::vector<std::vector<TimeWindow>> windows_;
};

/// Roots of t -> phi_hat(x_V, t) inside the slab for every mesh vertex.
std::vector<std::vector<double>> vertex_roots(const DiscreteLevelSet& ls);

CutTopologySlab detect_active(const DiscreteLevelSet& ls);

/// Zero segment of the linear interpolant of `values` on the triangle with the
/// given corners. Exact zeros are shifted to +zero_shift first; none when
/// there is no sign change. Throws DegenerateCutError if all values are 0.
std::optional<std::array<Vec2, 2>> cut_segment(const std::array<Vec2, 3>& corners,
                                               std::array<double, 3> values, double zero_shift);

struct SurfacePoint {
  int elem;     // index into CutTopologySlab::active()
  int tri;      // triangle index
  Vec2 x;       // point on Gamma_lin(t)
  double t;
  double weight;
};

/// Flat list of quadrature points grouped by active element.
struct SurfaceQuadrature {
  std::vector<SurfacePoint> points;
  std::vector<int> offsets;  // points of element e: [offsets[e], offsets[e+1])

  std::span<const SurfacePoint> element(int e) const {
    return {points.data() + offsets[e], static_cast<std::size_t>(offsets[e + 1] - offsets[e])};
  }
  double total_weight() const;
};

/// Space-time surface rule: per active element and cut window, L Gauss
/// times, q_s Gauss points on each cut segment.
SurfaceQuadrature build_surface_quadrature(const CutTopologySlab& topo, const DiscreteLevelSet& ls,
                                           int L, int q_s);

/// Rule on Gamma_lin(t) at a fixed time t in the slab (weights carry no dt).
SurfaceQuadrature build_slice_quadrature(const CutTopologySlab& topo, const DiscreteLevelSet& ls,
                                         double t, int q_s);

struct PrismPoint {
  int elem;
  int tri;
  Vec2 x;
  double t;
  double weight;
};

struct PrismQuadrature {
  std::vector<PrismPoint> points;
  std::vector<int> offsets;

  std::span<const PrismPoint> element(int e) const {
    return {points.data() + offsets[e], static_cast<std::size_t>(offsets[e + 1] - offsets[e])};
  }
  double total_weight() const;
};

/// Tensor rule on the active prisms K x I_n: triangle rule exact to degree
/// 2 q_s - 2 times q_t Gauss points in time.
PrismQuadrature build_prism_quadrature(const CutTopologySlab& topo, const Triangulation& mesh,
                                       int q_s, int q_t);

}  // namespace sttrace
