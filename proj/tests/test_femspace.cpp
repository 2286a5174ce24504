#include <cmath>
#include <set>

#include <doctest.h>

#include "sttrace/error.hpp"
#include "sttrace/femspace.hpp"

using namespace sttrace;

namespace {

struct Space {
  AnalyticScene scene = make_moving_circle();
  Triangulation mesh;
  std::shared_ptr<const LagrangeNodes> nodes;
  DiscreteLevelSet ls;
  CutTopologySlab topo;
  SpaceTimeDeformation def;
  DofMap dm;

  Space(int k, int kq)
      : mesh(build_structured_mesh(scene.domain(), 0.125)),
        nodes(std::make_shared<const LagrangeNodes>(mesh, k)),
        ls(interpolate_levelset(scene, mesh, nodes, TimeGrid(1.0, 8), 2, k)),
        topo(detect_active(ls)),
        def(build_deformation(ls, topo)),
        dm(mesh, topo, nodes, kq) {}
};

}  // namespace

TEST_CASE("tensor basis sums to one") {
  for (int ks = 1; ks <= 3; ++ks)
    for (int kq = 0; kq <= 2; ++kq) {
      const TensorBasis b(ks, kq);
      CHECK(b.size() == b.spatial_size() * b.temporal_size());
      std::vector<double> v(b.size());
      std::vector<Vec3> g(b.size());
      b.eval(Vec2(0.2, 0.3), 0.7, v, g);
      double s = 0.0;
      Vec3 gs = Vec3::Zero();
      for (int i = 0; i < b.size(); ++i) {
        s += v[i];
        gs += g[i];
      }
      CHECK(s == doctest::Approx(1.0));
      CHECK(gs.norm() < 1e-12);
    }
}

TEST_CASE("dof map counts and element dofs") {
  const Space sp(2, 1);
  std::set<int> ids;
  for (int K : sp.topo.active())
    for (int id : sp.nodes->element_nodes(K)) ids.insert(id);
  CHECK(sp.dm.num_spatial() == static_cast<int>(ids.size()));
  CHECK(sp.dm.num_dofs() == 2 * sp.dm.num_spatial());
  CHECK(sp.dm.num_elements() == sp.topo.size());
  std::vector<int> dofs(sp.dm.basis().size());
  std::vector<int> seen(sp.dm.num_dofs(), 0);
  for (int e = 0; e < sp.dm.num_elements(); ++e) {
    sp.dm.element_dofs(e, dofs);
    for (int d : dofs) {
      REQUIRE(d >= 0);
      REQUIRE(d < sp.dm.num_dofs());
      seen[d] = 1;
    }
  }
  for (int s : seen) CHECK(s == 1);
  for (int sid = 0; sid < sp.dm.num_spatial(); ++sid) CHECK(sp.dm.spatial_index(sp.dm.spatial_node(sid)) == sid);
}

TEST_CASE("interpolation reproduces the discrete space") {
  const Space sp(2, 1);
  auto g = [](const Vec2& x, double t) { return 1.0 + x[0] * x[1] - 2.0 * x[1] * x[1] + t * (x[0] - 3.0); };
  const FEFunction u = interpolate_fe(sp.dm, g);
  CHECK(u.slab == 2);
  for (int e = 0; e < sp.dm.num_elements(); e += 7) {
    const int K = sp.dm.element_triangle(e);
    const Vec2 x = sp.mesh.to_physical(K, Vec2(0.3, 0.2));
    const double t = sp.dm.t0() + 0.3 * (sp.dm.t1() - sp.dm.t0());
    const FEValue v = eval_fe(u, sp.dm, e, x, t);
    CHECK(v.value == doctest::Approx(g(x, t)));
    CHECK(v.grad[0] == doctest::Approx(x[1] + t));
    CHECK(v.grad[1] == doctest::Approx(x[0] - 4.0 * x[1]));
    CHECK(v.dt == doctest::Approx(x[0] - 3.0));
  }
}

TEST_CASE("deformed gradient is the gradient of u o Theta^-1") {
  const Space sp(2, 1);
  auto g = [](const Vec2& x, double t) { return std::sin(x[0]) + x[1] * x[1] * (1.0 + t); };
  const FEFunction u = interpolate_fe(sp.dm, g);
  const int e = sp.dm.num_elements() / 3;
  const int K = sp.dm.element_triangle(e);
  const Vec2 x = sp.mesh.to_physical(K, Vec2(0.3, 0.3));
  const double t = sp.dm.t0() + 0.5 * (sp.dm.t1() - sp.dm.t0());
  const FEValue v = eval_fe(u, sp.dm, e, x, t, &sp.def);
  const Vec2 y = sp.def.image(K, x, t);
  const double h = 1e-6;
  for (int j = 0; j < 2; ++j) {
    Vec2 yp = y, ym = y;
    yp[j] += h;
    ym[j] -= h;
    const ReferencePoint p = invert_map(sp.def, sp.topo, yp, t, K);
    const ReferencePoint m = invert_map(sp.def, sp.topo, ym, t, K);
    const double fp = eval_fe(u, sp.dm, sp.topo.local_index(p.tri), p.x, t).value;
    const double fm = eval_fe(u, sp.dm, sp.topo.local_index(m.tri), m.x, t).value;
    CHECK(v.grad[j] == doctest::Approx((fp - fm) / (2 * h)).epsilon(1e-6));
  }
}

TEST_CASE("eval_fe_at locates the element and rejects outside points") {
  const Space sp(1, 1);
  const FEFunction u = interpolate_fe(sp.dm, [](const Vec2& x, double) { return x[0]; });
  const int K = sp.topo.active()[0];
  const Vec2 x = sp.mesh.to_physical(K, Vec2(0.25, 0.25));
  CHECK(eval_fe_at(u, sp.dm, sp.topo, x, sp.dm.t0()).value == doctest::Approx(x[0]));
  CHECK_THROWS_AS(eval_fe_at(u, sp.dm, sp.topo, Vec2(-0.9, -0.9), sp.dm.t0()), LookupError);
}
