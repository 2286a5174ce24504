#include <cmath>

#include <doctest.h>

#include "sttrace/error.hpp"
#include "sttrace/solver.hpp"
#include "sttrace/verify.hpp"

using namespace sttrace;

TEST_CASE("small systems") {
  SlabSystem s;
  s.A.resize(1, 1);
  s.A.insert(0, 0) = 2.0;
  s.b = Eigen::VectorXd::Constant(1, 4.0);
  double res = -1.0;
  CHECK(solve_slab(s, 3, &res)[0] == doctest::Approx(2.0));
  CHECK(res <= 1e-15);

  SlabSystem tri;
  tri.A.resize(4, 4);
  for (int i = 0; i < 4; ++i) {
    tri.A.insert(i, i) = 2.0;
    if (i > 0) tri.A.insert(i, i - 1) = -1.0;
    if (i < 3) tri.A.insert(i, i + 1) = -1.0;
  }
  tri.b = Eigen::VectorXd::Ones(4);
  const Eigen::VectorXd c = solve_slab(tri);
  CHECK(c[0] == doctest::Approx(2.0));
  CHECK(c[1] == doctest::Approx(3.0));
}

TEST_CASE("singular system raises SolveError with the slab index") {
  SlabSystem s;
  s.A.resize(2, 2);
  s.A.insert(0, 0) = 1.0;
  s.A.insert(1, 0) = 1.0;
  s.b = Eigen::VectorXd::Ones(2);
  try {
    solve_slab(s, 7);
    FAIL("expected SolveError");
  } catch (const SolveError& e) {
    CHECK(e.slab() == 7);
  }
}

TEST_CASE("constants are preserved when w = 0 and f = 0") {
  CHECK(constant_solution_defect(2.5, 1) <= 1e-10);
  CHECK(constant_solution_defect(-1.0, 2) <= 1e-10);
}

TEST_CASE("march visits every slab in order") {
  const AnalyticScene scene = make_moving_circle();
  const Triangulation mesh = build_structured_mesh(scene.domain(), 0.125);
  const TimeGrid grid = build_time_grid(1.0, 0.125, 0);
  std::vector<int> order;
  MarchOptions opt;
  opt.retain_slabs = true;
  opt.observer = [&](const SlabRecord& cur, const SlabRecord* prev, const TraceFn&) {
    CHECK((prev == nullptr) == (cur.n == 1));
    if (prev) CHECK(prev->n == cur.n - 1);
    CHECK(cur.residual <= 1e-10);
    order.push_back(cur.n);
  };
  const SpaceTimeSolution sol = march(MethodParams{}, scene, mesh, grid, opt);
  CHECK(order == std::vector<int>{1, 2, 3, 4, 5, 6, 7, 8});
  CHECK(sol.num_slabs == 8);
  REQUIRE(sol.slabs.size() == 8);
  REQUIRE(sol.initial);
  // u_h is close to the exact solution at a point of the curve.
  const SlabRecord& last = sol.slabs.back();
  const int K = last.topo->active()[0];
  const Vec2 x = mesh.to_physical(K, Vec2(1.0 / 3, 1.0 / 3));
  CHECK(std::isfinite(last.eval(K, x, 1.0)));
}

TEST_CASE("serial and parallel marches agree") {
  const AnalyticScene scene = make_moving_circle();
  const Triangulation mesh = build_structured_mesh(scene.domain(), 0.25);
  const TimeGrid grid = build_time_grid(1.0, 0.25, 0);
  MarchOptions a, b;
  a.parallel = false;
  a.retain_slabs = b.retain_slabs = true;
  const SpaceTimeSolution sa = march(MethodParams{}, scene, mesh, grid, a);
  const SpaceTimeSolution sb = march(MethodParams{}, scene, mesh, grid, b);
  for (int n = 0; n < 4; ++n) CHECK((sa.slabs[n].u.coeffs - sb.slabs[n].u.coeffs).norm() == 0.0);
}

TEST_CASE("surface outside the mesh raises EmptyActiveSetError") {
  AnalyticScene scene = make_stationary_circle(0.5);
  scene.set_domain(Rectangle{0.6, 1.0, 0.6, 1.0});
  const Triangulation mesh = build_structured_mesh(scene.domain(), 0.1);
  CHECK_THROWS_AS(march(MethodParams{}, scene, mesh, TimeGrid(1.0, 2)), EmptyActiveSetError);
}

TEST_CASE("previous trace on the active region") {
  const AnalyticScene scene = make_stationary_circle(0.5);
  const Triangulation mesh = build_structured_mesh(scene.domain(), 0.125);
  MarchOptions opt;
  opt.retain_slabs = true;
  const SpaceTimeSolution sol = march(MethodParams{}, scene, mesh, TimeGrid(1.0, 4), opt);
  std::atomic<int> fallbacks{0};
  const TraceFn tr = previous_trace(sol.slabs[0], sol.slabs[1].def.get(), &fallbacks);
  const int K = sol.slabs[0].topo->active()[2];
  const Vec2 x = mesh.to_physical(K, Vec2(0.2, 0.2));
  CHECK(tr(K, x) == doctest::Approx(sol.slabs[0].eval(K, x, 0.25)));
  CHECK(fallbacks.load() == 0);
}
