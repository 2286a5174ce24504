#pragma once

#include <cmath>

#include <Eigen/Dense>

namespace sttrace {

/// Second-order forward-mode number over the three variables (x, y, t).
///
/// Carries the value, gradient and Hessian through arithmetic so analytic
/// scenes get exact first and second derivatives without hand-coding them.
struct Jet {
  double v = 0.0;
  Eigen::Vector3d g = Eigen::Vector3d::Zero();
  Eigen::Matrix3d H = Eigen::Matrix3d::Zero();

  Jet() = default;
  Jet(double value) : v(value) {}  // NOLINT: implicit lift of constants

  static Jet variable(double value, int index) {
    Jet j(value);
    j.g[index] = 1.0;
    return j;
  }
};

namespace detail {
// Chain rule for a scalar function with derivatives d1, d2 at a.v.
inline Jet chain(const Jet& a, double f, double d1, double d2) {
  Jet r;
  r.v = f;
  r.g = d1 * a.g;
  r.H = d1 * a.H + d2 * a.g * a.g.transpose();
  return r;
}
}  // namespace detail

inline Jet operator+(const Jet& a, const Jet& b) {
  Jet r;
  r.v = a.v + b.v;
  r.g = a.g + b.g;
  r.H = a.H + b.H;
  return r;
}
inline Jet operator-(const Jet& a, const Jet& b) {
  Jet r;
  r.v = a.v - b.v;
  r.g = a.g - b.g;
  r.H = a.H - b.H;
  return r;
}
inline Jet operator-(const Jet& a) {
  Jet r;
  r.v = -a.v;
  r.g = -a.g;
  r.H = -a.H;
  return r;
}
inline Jet operator*(const Jet& a, const Jet& b) {
  Jet r;
  r.v = a.v * b.v;
  r.g = a.v * b.g + b.v * a.g;
  r.H = a.v * b.H + b.v * a.H + a.g * b.g.transpose() + b.g * a.g.transpose();
  return r;
}
inline Jet inverse(const Jet& a) {
  const double iv = 1.0 / a.v;
  return detail::chain(a, iv, -iv * iv, 2.0 * iv * iv * iv);
}
inline Jet operator/(const Jet& a, const Jet& b) { return a * inverse(b); }

inline Jet operator+(const Jet& a, double b) { Jet r = a; r.v += b; return r; }
inline Jet operator+(double a, const Jet& b) { return b + a; }
inline Jet operator-(const Jet& a, double b) { Jet r = a; r.v -= b; return r; }
inline Jet operator-(double a, const Jet& b) { return -b + a; }
inline Jet operator*(const Jet& a, double b) {
  Jet r;
  r.v = a.v * b;
  r.g = a.g * b;
  r.H = a.H * b;
  return r;
}
inline Jet operator*(double a, const Jet& b) { return b * a; }
inline Jet operator/(const Jet& a, double b) { return a * (1.0 / b); }
inline Jet operator/(double a, const Jet& b) { return a * inverse(b); }

inline Jet sqrt(const Jet& a) {
  const double s = std::sqrt(a.v);
  return detail::chain(a, s, 0.5 / s, -0.25 / (s * a.v));
}
inline Jet exp(const Jet& a) {
  const double e = std::exp(a.v);
  return detail::chain(a, e, e, e);
}
inline Jet sin(const Jet& a) {
  const double s = std::sin(a.v), c = std::cos(a.v);
  return detail::chain(a, s, c, -s);
}
inline Jet cos(const Jet& a) {
  const double s = std::sin(a.v), c = std::cos(a.v);
  return detail::chain(a, c, -s, -c);
}
/// max(a, floor) with the derivatives of whichever branch is active.
inline Jet clamp_below(const Jet& a, double floor) { return a.v >= floor ? a : Jet(floor); }
inline double clamp_below(double a, double floor) { return a >= floor ? a : floor; }

}  // namespace sttrace
