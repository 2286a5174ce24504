#include "sttrace/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include "sttrace/error.hpp"

namespace sttrace {

Triangulation::Triangulation(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)) {
  const int nt = num_triangles();
  tri_edges_.resize(nt);
  jac_.resize(nt);
  inv_jac_.resize(nt);
  std::map<std::pair<int, int>, int> edge_id;
  for (int t = 0; t < nt; ++t) {
    const auto& v = triangles_[t];
    for (int e = 0; e < 3; ++e) {
      int a = v[(e + 1) % 3], b = v[(e + 2) % 3];
      if (a > b) std::swap(a, b);
      auto [it, inserted] = edge_id.try_emplace({a, b}, num_edges());
      if (inserted) {
        edges_.push_back({{a, b}, {t, -1}});
      } else {
        edges_[it->second].tri[1] = t;
      }
      tri_edges_[t][e] = it->second;
      h_ = std::max(h_, (vertices_[a] - vertices_[b]).norm());
    }
    Mat2 J;
    J.col(0) = vertices_[v[1]] - vertices_[v[0]];
    J.col(1) = vertices_[v[2]] - vertices_[v[0]];
    if (J.determinant() <= 0.0) throw ConfigError("triangle with non-positive area");
    jac_[t] = J;
    inv_jac_[t] = J.inverse();
  }
}

int Triangulation::neighbor(int t, int e) const {
  const Edge& edge = edges_[tri_edges_[t][e]];
  return edge.tri[0] == t ? edge.tri[1] : edge.tri[0];
}

std::array<Vec2, 3> Triangulation::corners(int t) const {
  const auto& v = triangles_[t];
  return {vertices_[v[0]], vertices_[v[1]], vertices_[v[2]]};
}

double Triangulation::signed_area(int t) const { return 0.5 * jac_[t].determinant(); }

Vec2 Triangulation::to_reference(int t, const Vec2& x) const {
  return inv_jac_[t] * (x - vertices_[triangles_[t][0]]);
}

Vec2 Triangulation::to_physical(int t, const Vec2& ref) const {
  return vertices_[triangles_[t][0]] + jac_[t] * ref;
}

std::array<double, 3> Triangulation::barycentric(int t, const Vec2& x) const {
  const Vec2 r = to_reference(t, x);
  return {1.0 - r[0] - r[1], r[0], r[1]};
}

int Triangulation::locate(const Vec2& x, int hint, const std::function<bool(int)>& allowed,
                          double tol) const {
  auto ok = [&](int t) { return t >= 0 && (!allowed || allowed(t)); };
  int t = ok(hint) ? hint : -1;
  for (int step = 0; t >= 0 && step < num_triangles(); ++step) {
    const auto b = barycentric(t, x);
    int worst = 0;
    for (int e = 1; e < 3; ++e)
      if (b[e] < b[worst]) worst = e;
    if (b[worst] >= -tol) return t;
    const int next = neighbor(t, worst);
    if (!ok(next)) break;
    t = next;
  }
  for (int s = 0; s < num_triangles(); ++s) {
    if (!ok(s)) continue;
    const auto b = barycentric(s, x);
    if (b[0] >= -tol && b[1] >= -tol && b[2] >= -tol) return s;
  }
  return -1;
}

TimeGrid::TimeGrid(double T, int N) : T_(T), N_(N) {
  if (!(T > 0.0) || N < 1) throw ConfigError("TimeGrid: need T > 0 and N >= 1");
}

namespace {

int integral_ratio(double length, double step, const char* what) {
  const double r = length / step;
  const double n = std::round(r);
  if (n < 1.0 || std::abs(r - n) > 1e-12 * std::max(1.0, r))
    throw ConfigError(std::string(what) + ": step does not divide the interval");
  return static_cast<int>(n);
}

}  // namespace

Triangulation build_structured_mesh(const Rectangle& domain, double h_init) {
  if (!(h_init > 0.0)) throw ConfigError("build_structured_mesh: h_init must be positive");
  const int nx = integral_ratio(domain.xmax - domain.xmin, h_init, "build_structured_mesh");
  const int ny = integral_ratio(domain.ymax - domain.ymin, h_init, "build_structured_mesh");
  std::vector<Vec2> verts;
  verts.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      verts.emplace_back(domain.xmin + i * h_init, domain.ymin + j * h_init);
  std::vector<std::array<int, 3>> tris;
  tris.reserve(2 * static_cast<std::size_t>(nx) * ny);
  auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      tris.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      tris.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  return Triangulation(std::move(verts), std::move(tris));
}

Triangulation refine_uniform(const Triangulation& mesh) {
  std::vector<Vec2> verts = mesh.vertices();
  const int nv = mesh.num_vertices();
  for (const Edge& e : mesh.edges()) verts.push_back(0.5 * (verts[e.v[0]] + verts[e.v[1]]));
  std::vector<std::array<int, 3>> tris;
  tris.reserve(4 * static_cast<std::size_t>(mesh.num_triangles()));
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& v = mesh.triangle(t);
    const auto& te = mesh.triangle_edges(t);
    const int m0 = nv + te[0], m1 = nv + te[1], m2 = nv + te[2];
    tris.push_back({v[0], m2, m1});
    tris.push_back({m2, v[1], m0});
    tris.push_back({m1, m0, v[2]});
    tris.push_back({m0, m1, m2});
  }
  return Triangulation(std::move(verts), std::move(tris));
}

TimeGrid build_time_grid(double T, double dt_init, int level) {
  if (!(T > 0.0) || !(dt_init > 0.0) || level < 0)
    throw ConfigError("build_time_grid: need T > 0, dt_init > 0, level >= 0");
  const double dt = std::ldexp(dt_init, -level);
  return TimeGrid(T, integral_ratio(T, dt, "build_time_grid"));
}

LagrangeNodes::LagrangeNodes(const Triangulation& mesh, int order)
    : order_(order), basis_(order) {
  npe_ = basis_.size();
  const int k = order;
  const int nv = mesh.num_vertices();
  const int ne = mesh.num_edges();
  const int n_interior = (k - 1) * (k - 2) / 2;
  const int total = nv + ne * (k - 1) + mesh.num_triangles() * n_interior;
  coords_.resize(total);
  elem_nodes_.resize(static_cast<std::size_t>(mesh.num_triangles()) * npe_);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& v = mesh.triangle(t);
    int* out = elem_nodes_.data() + static_cast<std::size_t>(t) * npe_;
    int interior = 0;
    for (int i = 0; i < npe_; ++i) {
      const auto& m = basis_.multi_index(i);
      const int zeros = (m[0] == 0) + (m[1] == 0) + (m[2] == 0);
      int gid;
      if (zeros == 2) {
        const int lv = m[0] == k ? 0 : (m[1] == k ? 1 : 2);
        gid = v[lv];
      } else if (zeros == 1) {
        const int e = m[0] == 0 ? 0 : (m[1] == 0 ? 1 : 2);
        const int a = (e + 1) % 3, b = (e + 2) % 3;
        const int s = v[a] > v[b] ? m[a] : m[b];  // steps from the lower vertex id
        gid = nv + mesh.triangle_edges(t)[e] * (k - 1) + (s - 1);
      } else {
        gid = nv + ne * (k - 1) + t * n_interior + interior++;
      }
      out[i] = gid;
      coords_[gid] = mesh.to_physical(t, basis_.node(i));
    }
  }
}

}  // namespace sttrace
