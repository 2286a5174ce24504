#include <cmath>

#include <doctest.h>

#include "sttrace/assembly.hpp"
#include "sttrace/error.hpp"
#include "sttrace/scene.hpp"

using namespace sttrace;

namespace {

void check_derivatives(const AnalyticScene& s, const Vec2& x, double t) {
  const double e = 1e-6;
  const PhiDerivs d = s.phi_derivs(x, t);
  CHECK(d.value == doctest::Approx(s.phi(x, t)));
  for (int i = 0; i < 2; ++i) {
    Vec2 xp = x, xm = x;
    xp[i] += e;
    xm[i] -= e;
    CHECK(d.grad[i] == doctest::Approx((s.phi(xp, t) - s.phi(xm, t)) / (2 * e)).epsilon(1e-7));
    const Vec2 gd = (s.phi_derivs(xp, t).grad - s.phi_derivs(xm, t).grad) / (2 * e);
    CHECK((d.hess.col(i) - gd).norm() < 1e-6);
    const Vec2 wd = (s.w(xp, t) - s.w(xm, t)) / (2 * e);
    CHECK((s.grad_w(x, t).col(i) - wd).norm() < 1e-6);
  }
  CHECK(d.dt == doctest::Approx((s.phi(x, t + e) - s.phi(x, t - e)) / (2 * e)).epsilon(1e-7));
  const Vec2 gt = (s.phi_derivs(x, t + e).grad - s.phi_derivs(x, t - e).grad) / (2 * e);
  CHECK((d.grad_dt - gt).norm() < 1e-6);
}

}  // namespace

TEST_CASE("level-set and velocity derivatives agree with finite differences") {
  check_derivatives(make_moving_circle(), Vec2(0.3, 0.55), 0.4);
  check_derivatives(make_stationary_circle(), Vec2(0.2, -0.45), 0.1);
  check_derivatives(make_merging_circles(), Vec2(0.7, 0.4), 0.3);
}

TEST_CASE("velocity solves the level-set equation") {
  for (const auto& s : {make_moving_circle(), make_merging_circles()}) {
    for (const Vec2 x : {Vec2(0.31, 0.52), Vec2(-0.4, 0.1), Vec2(1.1, -0.2)}) {
      const PhiDerivs d = s.phi_derivs(x, 0.35);
      CHECK(std::abs(d.dt + s.w(x, 0.35).dot(d.grad)) < 1e-12);
      CHECK(s.normal_velocity(x, 0.35) == doctest::Approx(-d.dt / d.grad.norm()));
    }
  }
}

TEST_CASE("exact solution data") {
  const AnalyticScene s = make_moving_circle();
  REQUIRE(s.has_exact_solution());
  const Vec2 x(0.2, 0.7);
  CHECK(s.u(x, 0.5) == doctest::Approx(0.7 * 1.04 * std::exp(-0.5)));
  CHECK(s.u0(x) == doctest::Approx(s.u(x, 0.0)));
  const AnalyticScene m = make_merging_circles();
  CHECK_FALSE(m.has_exact_solution());
  CHECK(m.u0(x) == doctest::Approx(15.2));
  CHECK_THROWS_AS(make_scene("torus"), ConfigError);
}

TEST_CASE("closest point lies on the curve with a tangential Jacobian") {
  const AnalyticScene s = make_moving_circle();
  const Vec2 y(0.25, 0.6);
  const ClosestPoint cp = s.closest_point(y, 0.3);
  CHECK(std::abs(s.phi(cp.point, 0.3)) < 1e-12);
  const Vec2 n = s.phi_derivs(cp.point, 0.3).grad.normalized();
  CHECK((cp.jacobian * n).norm() < 1e-10);
}

TEST_CASE("manufactured source vanishes for the stationary scene") {
  const AnalyticScene s = make_stationary_circle(0.5);
  for (double a : {0.0, 1.0, 2.5}) {
    const Vec2 x(0.5 * std::cos(a), 0.5 * std::sin(a));
    CHECK(std::abs(manufactured_source(s, x, 0.3, 1.0)) < 1e-12);
  }
}

TEST_CASE("domain and final time setters validate") {
  AnalyticScene s = make_moving_circle();
  s.set_final_time(0.5).set_domain(Rectangle{-2, 2, -2, 2});
  CHECK(s.T() == 0.5);
  CHECK(s.domain().xmax == 2.0);
  CHECK_THROWS_AS(s.set_final_time(0.0), ConfigError);
  CHECK_THROWS_AS(s.set_domain(Rectangle{1, -1, 0, 1}), ConfigError);
}
