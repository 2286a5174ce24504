#pragma once

#include <functional>
#include <optional>
#include <string>

#include "sttrace/jet.hpp"
#include "sttrace/mesh.hpp"

namespace sttrace {

/// Level-set derivatives at one space-time point.
struct PhiDerivs {
  double value = 0.0;
  Vec2 grad = Vec2::Zero();
  double dt = 0.0;
  Mat2 hess = Mat2::Zero();
  Vec2 grad_dt = Vec2::Zero();  // spatial gradient of dphi/dt
};

struct ClosestPoint {
  Vec2 point;
  Mat2 jacobian;  // d(point)/d(y)
};

/// Analytic evolving-curve scene: level set, velocity, data and (optionally)
/// the exact solution.
///
/// The velocity is w = -phi_t grad(phi)/|grad(phi)|^2 + a (phi_y, -phi_x),
/// which satisfies the level-set equation for any tangential weight a.
class AnalyticScene {
 public:
  using ScalarFn = std::function<double(double, double, double)>;
  using JetFn = std::function<Jet(const Jet&, const Jet&, const Jet&)>;
  using ClosestPointFn = std::function<ClosestPoint(const Vec2&, double)>;

  AnalyticScene(std::string name, Rectangle domain, double T, ScalarFn phi, JetFn phi_jet,
                double tangential_weight = 0.0);

  const std::string& name() const { return name_; }
  const Rectangle& domain() const { return domain_; }
  double T() const { return T_; }

  double phi(const Vec2& x, double t) const { return phi_(x[0], x[1], t); }
  PhiDerivs phi_derivs(const Vec2& x, double t) const;

  Vec2 w(const Vec2& x, double t) const;
  /// grad_w(i, j) = d w_i / d x_j.
  Mat2 grad_w(const Vec2& x, double t) const;
  void velocity(const Vec2& x, double t, Vec2& w, Mat2& grad_w) const;
  /// Exact normal velocity -phi_t / |grad phi|.
  double normal_velocity(const Vec2& x, double t) const;

  bool has_exact_solution() const { return static_cast<bool>(u_jet_); }
  double u(const Vec2& x, double t) const;
  Jet u_jet(const Vec2& x, double t) const;
  double u0(const Vec2& x) const;

  bool has_closest_point() const { return static_cast<bool>(closest_); }
  ClosestPoint closest_point(const Vec2& y, double t) const;

  /// Exact solution (value function plus its jet). Also sets u0 = u(., 0)
  /// unless an initial datum was set explicitly before.
  AnalyticScene& set_exact_solution(ScalarFn u, JetFn u_jet);
  AnalyticScene& set_initial_datum(std::function<double(const Vec2&)> u0);
  AnalyticScene& set_closest_point(ClosestPointFn cp);
  AnalyticScene& set_domain(const Rectangle& domain);
  AnalyticScene& set_final_time(double T);
  /// Drops the exact solution (used for scenes with f = 0 and no reference).
  AnalyticScene& clear_exact_solution();

 private:
  std::string name_;
  Rectangle domain_;
  double T_;
  ScalarFn phi_;
  JetFn phi_jet_;
  double tangential_;
  ScalarFn u_;
  JetFn u_jet_;
  std::function<double(const Vec2&)> u0_;
  bool explicit_u0_ = false;
  ClosestPointFn closest_;
};

/// Shrinking circle on (-1,1)^2 whose center travels along a semicircle;
/// exact solution u = y (x^2 + 1) e^{-t}.
AnalyticScene make_moving_circle();

/// Static circle of given radius centred at the origin on (-1,1)^2, w = 0,
/// exact solution u = x e^{-t/r^2} (so f = 0 for mu_d = 1).
AnalyticScene make_stationary_circle(double radius = 0.5);

/// Two circles merging on (-3,3)^2 over [0,1]; u0 = x + 15, f = 0,
/// no exact solution.
AnalyticScene make_merging_circles();

/// Look up a scene by its configuration name.
AnalyticScene make_scene(const std::string& name);

}  // namespace sttrace
