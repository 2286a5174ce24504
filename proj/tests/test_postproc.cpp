#include <cmath>
#include <numbers>

#include <doctest.h>

#include "sttrace/postproc.hpp"

using namespace sttrace;

TEST_CASE("eoc") {
  const auto e = compute_eoc({0.1, 0.05, 0.0125, 0.0125, std::nullopt, 0.1});
  REQUIRE(e.size() == 5);
  CHECK(*e[0] == doctest::Approx(1.0));
  CHECK(*e[1] == doctest::Approx(2.0));
  CHECK(*e[2] == doctest::Approx(0.0));
  CHECK_FALSE(e[3]);
  CHECK_FALSE(e[4]);
  CHECK_FALSE(eoc(0.1, 0.0));
  CHECK_FALSE(eoc(-1.0, 0.5));
}

namespace {

ErrorReport run(const AnalyticScene& scene, double h, int N, MethodParams p = {}) {
  const Triangulation mesh = build_structured_mesh(scene.domain(), h);
  ErrorAccumulator acc(scene, p);
  MarchOptions opt;
  opt.observer = acc.observer();
  march(p, scene, mesh, TimeGrid(1.0, N), opt);
  return acc.report();
}

}  // namespace

TEST_CASE("energy norm is the sum of its parts") {
  const ErrorReport r = run(make_moving_circle(), 0.25, 4);
  REQUIRE(r.energy());
  REQUIRE(r.surface_energy());
  const double sum = r.end_sq + r.jump_sq + r.l2_sq + r.grad_sq + r.xi_sq;
  CHECK(*r.energy() * *r.energy() == doctest::Approx(sum));
  CHECK(*r.surface_energy() <= *r.energy());
  CHECK(*r.linf_l2() == doctest::Approx(std::sqrt(r.end_sq)));
  CHECK(r.jumps.size() == 4);
  CHECK(r.i_mass.size() == 5);
  CHECK(r.i_surf.size() == 5);
}

TEST_CASE("errors decrease under refinement") {
  const ErrorReport a = run(make_moving_circle(), 0.25, 4);
  const ErrorReport b = run(make_moving_circle(), 0.125, 8);
  CHECK(*b.energy() < *a.energy());
  CHECK(*b.linf_l2() < *a.linf_l2());
}

TEST_CASE("stationary circle: area is constant and the L2 norm of 1 is |Gamma| dt") {
  const AnalyticScene scene = make_stationary_circle(0.5);
  const ErrorReport r = run(scene, 0.125, 4);
  for (double s : r.i_surf) CHECK(s == doctest::Approx(r.i_surf[0]).epsilon(1e-13));
  CHECK(r.i_surf[0] == doctest::Approx(std::numbers::pi).epsilon(0.02));

  const Triangulation mesh = build_structured_mesh(scene.domain(), 0.125);
  MarchOptions opt;
  opt.retain_slabs = true;
  const SpaceTimeSolution sol = march(MethodParams{}, scene, mesh, TimeGrid(1.0, 4), opt);
  AnalyticScene one = scene;
  one.set_exact_solution([](double, double, double) { return 1.0; },
                          [](const Jet&, const Jet&, const Jet&) { return Jet(1.0); });
  SpaceTimeSolution zs = sol;
  for (auto& s : zs.slabs) s.u.coeffs.setZero();
  const ErrorReport z = evaluate_errors(zs, one, MethodParams{});
  CHECK(z.l2_sq == doctest::Approx(r.i_surf[0] * 1.0).epsilon(1e-10));
  CHECK(z.end_sq == doctest::Approx(r.i_surf[0]).epsilon(1e-10));
  CHECK(z.grad_sq == doctest::Approx(0.0));
  const MassSeries m = mass_area_series(sol, scene, MethodParams{});
  CHECK(m.i_surf.size() == 5);
  CHECK(m.i_surf[0] == doctest::Approx(r.i_surf[0]));
}

TEST_CASE("scenes without an exact solution have no norms") {
  const ErrorReport r = run(make_merging_circles(), 0.5, 8);
  CHECK_FALSE(r.energy());
  CHECK_FALSE(r.linf_l2());
  CHECK(r.i_mass.size() == 9);
  CHECK(std::isfinite(r.e_mass));
}
