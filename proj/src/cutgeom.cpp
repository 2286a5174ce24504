#include "sttrace/cutgeom.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sttrace/error.hpp"

namespace sttrace {

CutTopologySlab::CutTopologySlab(int slab, std::array<double, 2> interval, int num_triangles)
    : slab_(slab), t0_(interval[0]), t1_(interval[1]), local_(num_triangles, -1) {}

void CutTopologySlab::add(int K, std::vector<double> breakpoints, std::vector<TimeWindow> windows) {
  local_[K] = static_cast<int>(active_.size());
  active_.push_back(K);
  breakpoints_.push_back(std::move(breakpoints));
  windows_.push_back(std::move(windows));
}

std::vector<std::vector<double>> vertex_roots(const DiscreteLevelSet& ls) {
  const int nv = ls.mesh().num_vertices();
  std::vector<std::vector<double>> roots(nv);
  const double tol = 1e-13;
#pragma omp parallel for schedule(static)
  for (int v = 0; v < nv; ++v) {
    const auto s = interpolant_roots(ls.time_basis(), ls.node_series(v), tol);
    roots[v].reserve(s.size());
    for (double r : s) roots[v].push_back(ls.t0() + r * ls.dt());
  }
  return roots;
}

CutTopologySlab detect_active(const DiscreteLevelSet& ls) {
  const Triangulation& mesh = ls.mesh();
  const int nt = mesh.num_triangles();
  const auto roots = vertex_roots(ls);
  const double min_window = 1e-14 * ls.dt();
  // Classified in parallel, appended serially in triangle order.
  std::vector<std::vector<double>> bps(nt);
  std::vector<std::vector<TimeWindow>> wins(nt);
  std::vector<char> active(nt, 0);
#pragma omp parallel for schedule(dynamic, 256)
  for (int K = 0; K < nt; ++K) {
    const auto& tri = mesh.triangle(K);
    std::vector<double> b{ls.t0()};
    for (int c = 0; c < 3; ++c) b.insert(b.end(), roots[tri[c]].begin(), roots[tri[c]].end());
    b.push_back(ls.t1());
    std::sort(b.begin() + 1, b.end() - 1);
    std::vector<TimeWindow> w;
    bool any = false;
    for (std::size_t j = 0; j + 1 < b.size(); ++j) {
      if (b[j + 1] - b[j] < min_window) continue;
      const auto val = ls.corner_values(K, 0.5 * (b[j] + b[j + 1]));
      const bool pos = val[0] > 0.0 || val[1] > 0.0 || val[2] > 0.0;
      const bool neg = val[0] < 0.0 || val[1] < 0.0 || val[2] < 0.0;
      w.push_back({b[j], b[j + 1], pos && neg});
      any = any || (pos && neg);
    }
    if (any) {
      active[K] = 1;
      bps[K] = std::move(b);
      wins[K] = std::move(w);
    }
  }
  CutTopologySlab topo(ls.slab(), {ls.t0(), ls.t1()}, nt);
  for (int K = 0; K < nt; ++K)
    if (active[K]) topo.add(K, std::move(bps[K]), std::move(wins[K]));
  return topo;
}

std::optional<std::array<Vec2, 2>> cut_segment(const std::array<Vec2, 3>& corners,
                                               std::array<double, 3> values, double zero_shift) {
  if (values[0] == 0.0 && values[1] == 0.0 && values[2] == 0.0)
    throw DegenerateCutError("level set vanishes on a whole triangle");
  for (double& v : values)
    if (v == 0.0) v = zero_shift;
  std::array<Vec2, 2> seg;
  int found = 0;
  for (int e = 0; e < 3; ++e) {
    const int a = (e + 1) % 3, b = (e + 2) % 3;
    if ((values[a] < 0.0) == (values[b] < 0.0)) continue;
    const double s = values[a] / (values[a] - values[b]);
    seg[found++] = corners[a] + s * (corners[b] - corners[a]);
  }
  if (found != 2) return std::nullopt;
  return seg;
}

double SurfaceQuadrature::total_weight() const {
  double s = 0.0;
  for (const auto& p : points) s += p.weight;
  return s;
}

double PrismQuadrature::total_weight() const {
  double s = 0.0;
  for (const auto& p : points) s += p.weight;
  return s;
}

namespace {

void append_segment_points(SurfaceQuadrature& q, const Rule1D& rule, int e, int K,
                           const std::array<Vec2, 2>& seg, double t, double weight) {
  const double len = (seg[1] - seg[0]).norm();
  for (std::size_t i = 0; i < rule.nodes.size(); ++i)
    q.points.push_back(
        {e, K, seg[0] + rule.nodes[i] * (seg[1] - seg[0]), t, weight * rule.weights[i] * len});
}

}  // namespace

SurfaceQuadrature build_surface_quadrature(const CutTopologySlab& topo, const DiscreteLevelSet& ls,
                                           int L, int q_s) {
  if (L < 1 || q_s < 1) throw ConfigError("quadrature orders must be >= 1");
  const Rule1D time_rule = gauss_legendre(L);
  const Rule1D seg_rule = gauss_legendre(q_s);
  SurfaceQuadrature q;
  q.offsets.push_back(0);
  for (int e = 0; e < topo.size(); ++e) {
    const int K = topo.active()[e];
    const auto corners = ls.mesh().corners(K);
    for (const TimeWindow& w : topo.windows(e)) {
      if (!w.cut) continue;
      const double len = w.t1 - w.t0;
      for (int l = 0; l < L; ++l) {
        const double t = w.t0 + time_rule.nodes[l] * len;
        const auto seg = cut_segment(corners, ls.corner_values(K, t), ls.zero_shift());
        if (seg) append_segment_points(q, seg_rule, e, K, *seg, t, time_rule.weights[l] * len);
      }
    }
    q.offsets.push_back(static_cast<int>(q.points.size()));
  }
  return q;
}

SurfaceQuadrature build_slice_quadrature(const CutTopologySlab& topo, const DiscreteLevelSet& ls,
                                         double t, int q_s) {
  const Rule1D seg_rule = gauss_legendre(q_s);
  SurfaceQuadrature q;
  q.offsets.push_back(0);
  for (int e = 0; e < topo.size(); ++e) {
    const int K = topo.active()[e];
    const auto seg = cut_segment(ls.mesh().corners(K), ls.corner_values(K, t), ls.zero_shift());
    if (seg) append_segment_points(q, seg_rule, e, K, *seg, t, 1.0);
    q.offsets.push_back(static_cast<int>(q.points.size()));
  }
  return q;
}

PrismQuadrature build_prism_quadrature(const CutTopologySlab& topo, const Triangulation& mesh,
                                       int q_s, int q_t) {
  if (q_s < 1 || q_t < 1) throw ConfigError("quadrature orders must be >= 1");
  const auto tri_rule = triangle_rule(q_s);
  const Rule1D time_rule = gauss_legendre(q_t);
  const double dt = topo.t1() - topo.t0();
  PrismQuadrature q;
  q.offsets.push_back(0);
  for (int e = 0; e < topo.size(); ++e) {
    const int K = topo.active()[e];
    const double det = mesh.jacobian(K).determinant();
    for (const auto& tp : tri_rule) {
      const Vec2 x = mesh.to_physical(K, tp.ref);
      for (int l = 0; l < q_t; ++l)
        q.points.push_back({e, K, x, topo.t0() + time_rule.nodes[l] * dt,
                            det * tp.weight * dt * time_rule.weights[l]});
    }
    q.offsets.push_back(static_cast<int>(q.points.size()));
  }
  return q;
}

}  // namespace sttrace
