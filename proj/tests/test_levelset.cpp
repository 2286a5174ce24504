#include <cmath>
#include <memory>

#include <doctest.h>

#include "sttrace/error.hpp"
#include "sttrace/levelset.hpp"

using namespace sttrace;

namespace {

Triangulation mesh_at(const Rectangle& d, double h, int level) {
  Triangulation m = build_structured_mesh(d, h);
  for (int i = 0; i < level; ++i) m = refine_uniform(m);
  return m;
}

}  // namespace

TEST_CASE("interpolant matches phi at the space-time nodes") {
  const AnalyticScene s = make_moving_circle();
  const Triangulation mesh = build_structured_mesh(s.domain(), 0.25);
  const TimeGrid grid(1.0, 4);
  for (int k = 1; k <= 2; ++k) {
    const DiscreteLevelSet ls = interpolate_levelset(s, mesh, grid, 2, k, k);
    CHECK(ls.t0() == doctest::Approx(0.25));
    CHECK(ls.num_time_nodes() == k + 1);
    for (int K : {3, 17, 40}) {
      const auto en = ls.nodes().element_nodes(K);
      for (int i = 0; i < ls.nodes().nodes_per_element(); ++i)
        for (int m = 0; m <= k; ++m) {
          const double t = ls.time_node(m);
          CHECK(ls.eval(K, ls.nodes().coord(en[i]), t) == doctest::Approx(s.phi(ls.nodes().coord(en[i]), t)));
        }
    }
  }
}

TEST_CASE("interpolation error decreases at order k+1 in a band") {
  const AnalyticScene s = make_moving_circle();
  double prev = 0.0, eoc = 0.0;
  for (int l = 0; l < 3; ++l) {
    const Triangulation mesh = mesh_at(s.domain(), 0.25, l);
    const TimeGrid grid = build_time_grid(1.0, 0.25, l);
    const DiscreteLevelSet ls = interpolate_levelset(s, mesh, grid, 1, 2, 2);
    double err = 0.0;
    for (int K = 0; K < mesh.num_triangles(); ++K) {
      const Vec2 x = mesh.to_physical(K, Vec2(1.0 / 3, 1.0 / 3));
      if (std::abs(s.phi(x, 0.0)) > 0.2) continue;
      for (double f : {0.2, 0.7}) {
        const double t = ls.t0() + f * ls.dt();
        err = std::max(err, std::abs(ls.eval(K, x, t) - s.phi(x, t)));
      }
    }
    if (l > 0) eoc = std::log2(prev / err);
    prev = err;
  }
  CHECK(eoc > 2.5);
}

TEST_CASE("piecewise linear part and its normals") {
  const AnalyticScene s = make_moving_circle();
  const Triangulation mesh = build_structured_mesh(s.domain(), 0.125);
  const TimeGrid grid(1.0, 8);
  const DiscreteLevelSet ls = interpolate_levelset(s, mesh, grid, 3, 2, 1);
  const int K = mesh.locate(Vec2(0.41, 0.2), -1);
  const Vec2 x = mesh.to_physical(K, Vec2(0.3, 0.3));
  const double t = ls.t0() + 0.4 * ls.dt();
  double v, dt;
  Vec2 g;
  ls.eval_lin(K, x, t, v, g, dt);
  const auto c = ls.corner_values(K, t);
  const auto b = mesh.barycentric(K, x);
  CHECK(v == doctest::Approx(b[0] * c[0] + b[1] * c[1] + b[2] * c[2]));
  CHECK((g - ls.grad_lin(K, t)).norm() < 1e-14);
  const double e = 1e-6;
  double vp, vm, dummy;
  Vec2 gd;
  ls.eval_lin(K, x, t + e, vp, gd, dummy);
  ls.eval_lin(K, x, t - e, vm, gd, dummy);
  CHECK(dt == doctest::Approx((vp - vm) / (2 * e)).epsilon(1e-7));
  const LinearNormals n = eval_normals_lin(ls, K, x, t);
  CHECK(n.n_lin.norm() == doctest::Approx(1.0));
  CHECK(n.n_slin.norm() == doctest::Approx(1.0));
  CHECK((n.n_slin.head<2>().normalized() - n.n_lin).norm() < 1e-12);
  CHECK(n.n_slin[2] * dt >= 0.0);
  CHECK(ls.vertex_value(mesh.triangle(K)[1], t) == doctest::Approx(c[1]));
}

TEST_CASE("improved alpha: exact for w = 0, close to sqrt(1+V^2) otherwise") {
  {
    const AnalyticScene s = make_stationary_circle(0.5);
    const Triangulation mesh = build_structured_mesh(s.domain(), 0.125);
    const DiscreteLevelSet ls = interpolate_levelset(s, mesh, TimeGrid(1.0, 4), 1, 1, 1);
    std::vector<int> all(mesh.num_triangles());
    for (int K = 0; K < mesh.num_triangles(); ++K) all[K] = K;
    const AlphaField a = AlphaField::improved(s, ls, all);
    CHECK(a.mode() == AlphaMode::Improved);
    CHECK(a.eval(5, mesh.to_physical(5, Vec2(0.2, 0.2)), 0.1, 3.0) == doctest::Approx(1.0));
  }
  const AnalyticScene s = make_moving_circle();
  double prev = 0.0, eoc = 0.0;
  for (int l = 0; l < 3; ++l) {
    const Triangulation mesh = mesh_at(s.domain(), 0.25, l);
    const TimeGrid grid = build_time_grid(1.0, 0.25, l);
    const DiscreteLevelSet ls = interpolate_levelset(s, mesh, grid, 1, 1, 1);
    std::vector<int> all(mesh.num_triangles());
    for (int K = 0; K < mesh.num_triangles(); ++K) all[K] = K;
    const AlphaField a = AlphaField::improved(s, ls, all);
    const Vec2 y(0.0, 0.45);
    const int K = mesh.locate(y, -1);
    const double t = 0.5 * ls.dt();
    const double V = s.normal_velocity(y, t);
    const double err = std::abs(a.eval(K, y, t, 0.0) - std::sqrt(1.0 + V * V));
    if (l > 0) eoc = std::log2(prev / err);
    prev = err;
  }
  CHECK(eoc > 0.8);
  CHECK(AlphaField::simple().eval(0, Vec2::Zero(), 0.0, 0.75) == doctest::Approx(1.25));
}

TEST_CASE("Oswald averaging counts contributions") {
  const Triangulation mesh = build_structured_mesh(Rectangle{0, 1, 0, 1}, 1.0);
  const LagrangeNodes nodes(mesh, 1);
  const std::vector<int> elems{0, 1};
  const std::vector<double> local{1, 1, 1, 3, 3, 3};
  const OswaldField f = oswald_average(nodes, elems, 1, local);
  const auto a = mesh.triangle(0), b = mesh.triangle(1);
  int shared = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) shared += a[i] == b[j];
  CHECK(shared == 2);
  for (int v = 0; v < 4; ++v) {
    if (f.counts[v] == 2) CHECK(f.values[v] == doctest::Approx(2.0));
    else CHECK((f.values[v] == doctest::Approx(1.0) || f.values[v] == doctest::Approx(3.0)));
  }
}

TEST_CASE("vanishing gradient is reported") {
  AnalyticScene s("flat", Rectangle{-1, 1, -1, 1}, 1.0, [](double, double, double) { return 1.0; },
                  [](const Jet&, const Jet&, const Jet&) { return Jet(1.0); });
  const Triangulation mesh = build_structured_mesh(s.domain(), 0.5);
  const DiscreteLevelSet ls = interpolate_levelset(s, mesh, TimeGrid(1.0, 1), 1, 1, 1);
  CHECK_THROWS_AS(eval_normals_lin(ls, 0, mesh.to_physical(0, Vec2(0.3, 0.3)), 0.5),
                  DegenerateGradientError);
}
