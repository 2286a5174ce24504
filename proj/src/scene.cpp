#include "sttrace/scene.hpp"

#include <cmath>
#include <numbers>

#include "sttrace/error.hpp"

namespace sttrace {

namespace {

struct JetPoint {
  Jet x, y, t;
};

JetPoint seed(const Vec2& p, double t) {
  return {Jet::variable(p[0], 0), Jet::variable(p[1], 1), Jet::variable(t, 2)};
}

}  // namespace

AnalyticScene::AnalyticScene(std::string name, Rectangle domain, double T, ScalarFn phi,
                             JetFn phi_jet, double tangential_weight)
    : name_(std::move(name)),
      domain_(domain),
      T_(T),
      phi_(std::move(phi)),
      phi_jet_(std::move(phi_jet)),
      tangential_(tangential_weight) {}

PhiDerivs AnalyticScene::phi_derivs(const Vec2& x, double t) const {
  const JetPoint s = seed(x, t);
  const Jet j = phi_jet_(s.x, s.y, s.t);
  PhiDerivs d;
  d.value = j.v;
  d.grad = j.g.head<2>();
  d.dt = j.g[2];
  d.hess = j.H.topLeftCorner<2, 2>();
  d.grad_dt = j.H.block<2, 1>(0, 2);
  return d;
}

void AnalyticScene::velocity(const Vec2& x, double t, Vec2& w, Mat2& grad_w) const {
  const PhiDerivs d = phi_derivs(x, t);
  const double q = d.grad.squaredNorm();
  Mat2 rot;
  rot << 0.0, 1.0, -1.0, 0.0;
  if (q == 0.0) {
    w.setZero();
    grad_w = tangential_ * rot * d.hess;
    return;
  }
  // w = -s g / q + a R g with s = phi_t, g = grad phi, q = |g|^2
  const double s = d.dt;
  const Vec2& g = d.grad;
  w = -s * g / q + tangential_ * rot * g;
  const Vec2 dq = 2.0 * d.hess * g;  // d q / d x_j
  grad_w = -(g * d.grad_dt.transpose()) / q - s * d.hess / q + s * (g * dq.transpose()) / (q * q) +
           tangential_ * rot * d.hess;
}

Vec2 AnalyticScene::w(const Vec2& x, double t) const {
  Vec2 w;
  Mat2 gw;
  velocity(x, t, w, gw);
  return w;
}

Mat2 AnalyticScene::grad_w(const Vec2& x, double t) const {
  Vec2 w;
  Mat2 gw;
  velocity(x, t, w, gw);
  return gw;
}

double AnalyticScene::normal_velocity(const Vec2& x, double t) const {
  const PhiDerivs d = phi_derivs(x, t);
  return -d.dt / d.grad.norm();
}

double AnalyticScene::u(const Vec2& x, double t) const {
  if (!u_) throw UnsupportedSceneError("scene '" + name_ + "' has no exact solution");
  return u_(x[0], x[1], t);
}

Jet AnalyticScene::u_jet(const Vec2& x, double t) const {
  if (!u_jet_) throw UnsupportedSceneError("scene '" + name_ + "' has no exact solution");
  const JetPoint s = seed(x, t);
  return u_jet_(s.x, s.y, s.t);
}

double AnalyticScene::u0(const Vec2& x) const {
  if (!u0_) throw UnsupportedSceneError("scene '" + name_ + "' has no initial datum");
  return u0_(x);
}

ClosestPoint AnalyticScene::closest_point(const Vec2& y, double t) const {
  if (!closest_) throw UnsupportedSceneError("scene '" + name_ + "' has no closest-point map");
  return closest_(y, t);
}

AnalyticScene& AnalyticScene::set_exact_solution(ScalarFn u, JetFn u_jet) {
  u_ = std::move(u);
  u_jet_ = std::move(u_jet);
  if (!explicit_u0_) {
    auto uf = u_;
    u0_ = [uf](const Vec2& x) { return uf(x[0], x[1], 0.0); };
  }
  return *this;
}

AnalyticScene& AnalyticScene::set_initial_datum(std::function<double(const Vec2&)> u0) {
  u0_ = std::move(u0);
  explicit_u0_ = true;
  return *this;
}

AnalyticScene& AnalyticScene::set_closest_point(ClosestPointFn cp) {
  closest_ = std::move(cp);
  return *this;
}

AnalyticScene& AnalyticScene::set_domain(const Rectangle& domain) {
  if (!(domain.xmax > domain.xmin && domain.ymax > domain.ymin))
    throw ConfigError("domain must have positive extent");
  domain_ = domain;
  return *this;
}

AnalyticScene& AnalyticScene::set_final_time(double T) {
  if (!(T > 0.0)) throw ConfigError("final time must be positive");
  T_ = T;
  return *this;
}

AnalyticScene& AnalyticScene::clear_exact_solution() {
  u_ = nullptr;
  u_jet_ = nullptr;
  return *this;
}

namespace {

// Radial projection onto the circle |y - c| = r.
ClosestPoint circle_projection(const Vec2& y, const Vec2& c, double r) {
  const Vec2 d = y - c;
  const double rho = d.norm();
  const Vec2 e = d / rho;
  ClosestPoint cp;
  cp.point = c + r * e;
  cp.jacobian = (r / rho) * (Mat2::Identity() - e * e.transpose());
  return cp;
}

}  // namespace

AnalyticScene make_moving_circle() {
  constexpr double pi = std::numbers::pi;
  auto phi = [](auto x, auto y, auto t) {
    using std::cos;
    using std::exp;
    using std::sin;
    using std::sqrt;
    auto dx = x - cos(pi * t) / 2.0;
    auto dy = y - sin(pi * t) / 2.0;
    return sqrt(dx * dx + dy * dy) - 9.0 * exp(-t / 4.0) / 20.0;
  };
  auto u = [](auto x, auto y, auto t) {
    using std::exp;
    return y * (x * x + 1.0) * exp(-t);
  };
  AnalyticScene scene("moving_circle", Rectangle{-1, 1, -1, 1}, 1.0, phi, phi, 0.5);
  scene.set_exact_solution(u, u);
  scene.set_closest_point([](const Vec2& y, double t) {
    const Vec2 c(std::cos(pi * t) / 2.0, std::sin(pi * t) / 2.0);
    return circle_projection(y, c, 9.0 * std::exp(-t / 4.0) / 20.0);
  });
  return scene;
}

AnalyticScene make_stationary_circle(double radius) {
  auto phi = [radius](auto x, auto y, auto t) {
    using std::sqrt;
    return sqrt(x * x + y * y) - radius + 0.0 * t;
  };
  const double decay = 1.0 / (radius * radius);
  auto u = [decay](auto x, auto y, auto t) {
    using std::exp;
    return x * exp(-decay * t) + 0.0 * y;
  };
  AnalyticScene scene("stationary_circle", Rectangle{-1, 1, -1, 1}, 1.0, phi, phi, 0.0);
  scene.set_exact_solution(u, u);
  scene.set_closest_point(
      [radius](const Vec2& y, double) { return circle_projection(y, Vec2::Zero(), radius); });
  return scene;
}

AnalyticScene make_merging_circles() {
  // Distances are floored at 0.1 near the centres, far inside the curves.
  auto phi = [](auto x, auto y, auto t) {
    auto cx = 1.5 * (t - 1.0);
    auto dpx = x - cx;
    auto dmx = x + cx;
    auto rp = clamp_below(dpx * dpx + y * y, 1e-2);
    auto rm = clamp_below(dmx * dmx + y * y, 1e-2);
    return 1.0 - 1.0 / rp - 1.0 / rm;
  };
  AnalyticScene scene("merging_circles", Rectangle{-3, 3, -3, 3}, 1.0, phi, phi, 0.0);
  scene.set_initial_datum([](const Vec2& x) { return x[0] + 15.0; });
  return scene;
}

AnalyticScene make_scene(const std::string& name) {
  if (name == "moving_circle") return make_moving_circle();
  if (name == "stationary_circle") return make_stationary_circle();
  if (name == "merging_circles") return make_merging_circles();
  throw ConfigError("unknown scene '" + name + "'");
}

}  // namespace sttrace
