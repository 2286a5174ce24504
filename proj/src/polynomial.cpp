#include "sttrace/polynomial.hpp"

#include <cassert>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sttrace {

namespace {

// Legendre P_n and its derivative on [-1, 1].
void legendre(int n, double x, double& p, double& dp) {
  double p0 = 1.0, p1 = x;
  if (n == 0) {
    p = 1.0;
    dp = 0.0;
    return;
  }
  for (int k = 2; k <= n; ++k) {
    const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = pk;
  }
  p = p1;
  dp = n * (x * p1 - p0) / (x * x - 1.0);
}

}  // namespace

Rule1D gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  Rule1D r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double p = 0, dp = 0;
    for (int it = 0; it < 100; ++it) {
      legendre(n, x, p, dp);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    legendre(n, x, p, dp);
    // map to [0,1], ascending
    r.nodes[n - 1 - i] = 0.5 * (x + 1.0);
    r.weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

Rule1D gauss_lobatto(int n) {
  if (n < 2) throw std::invalid_argument("gauss_lobatto: n must be >= 2");
  Rule1D r;
  r.nodes.assign(n, 0.0);
  r.weights.assign(n, 0.0);
  const int m = n - 1;
  r.nodes[0] = 0.0;
  r.nodes[m] = 1.0;
  r.weights[0] = r.weights[m] = 1.0 / (n * (n - 1.0));
  // interior nodes: roots of P'_m, Newton on P'_m using the Legendre ODE
  for (int i = 1; i < m; ++i) {
    double x = -std::cos(std::numbers::pi * i / m);
    for (int it = 0; it < 100; ++it) {
      double p = 0, dp = 0;
      legendre(m, x, p, dp);
      // (1-x^2) P'' = 2x P' - m(m+1) P
      const double d2p = (2.0 * x * dp - m * (m + 1.0) * p) / (1.0 - x * x);
      const double dx = dp / d2p;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p = 0, dp = 0;
    legendre(m, x, p, dp);
    r.nodes[i] = 0.5 * (x + 1.0);
    r.weights[i] = 1.0 / (n * (n - 1.0) * p * p);
  }
  return r;
}

std::vector<double> temporal_nodes(int degree) {
  if (degree < 0) throw std::invalid_argument("temporal_nodes: negative degree");
  if (degree == 0) return {0.5};
  return gauss_lobatto(degree + 1).nodes;
}

Lagrange1D::Lagrange1D(std::vector<double> nodes) : nodes_(std::move(nodes)) {
  const int n = size();
  denom_.assign(n, 1.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (j != i) denom_[i] *= nodes_[i] - nodes_[j];
}

void Lagrange1D::eval(double s, std::span<double> values) const {
  const int n = size();
  for (int i = 0; i < n; ++i) {
    double p = 1.0;
    for (int j = 0; j < n; ++j)
      if (j != i) p *= s - nodes_[j];
    values[i] = p / denom_[i];
  }
}

void Lagrange1D::eval_derivative(double s, std::span<double> derivs) const {
  const int n = size();
  for (int i = 0; i < n; ++i) {
    double sum = 0.0;
    for (int k = 0; k < n; ++k) {
      if (k == i) continue;
      double p = 1.0;
      for (int j = 0; j < n; ++j)
        if (j != i && j != k) p *= s - nodes_[j];
      sum += p;
    }
    derivs[i] = sum / denom_[i];
  }
}

std::vector<double> interpolant_roots(const Lagrange1D& basis, std::span<const double> coeffs,
                                      double tol) {
  const int n = basis.size();
  std::vector<double> vals(n);
  auto f = [&](double s) {
    basis.eval(s, vals);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += coeffs[i] * vals[i];
    return sum;
  };
  auto negative = [](double v) { return v < 0.0; };

  std::vector<double> roots;
  if (basis.degree() <= 0) return roots;
  if (basis.degree() == 1) {
    const double a = coeffs[0], b = coeffs[1];
    if (negative(a) != negative(b)) {
      const double s = a / (a - b);
      if (s > 0.0 && s < 1.0) roots.push_back(s);
    }
    return roots;
  }
  const int samples = 16 * basis.degree();
  double sa = 0.0, fa = f(sa);
  for (int k = 1; k <= samples; ++k) {
    const double sb = static_cast<double>(k) / samples;
    const double fb = f(sb);
    if (negative(fa) != negative(fb)) {
      double lo = sa, hi = sb;
      const bool lo_neg = negative(fa);
      while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (negative(f(mid)) == lo_neg)
          lo = mid;
        else
          hi = mid;
      }
      const double root = 0.5 * (lo + hi);
      if (root > 0.0 && root < 1.0) roots.push_back(root);
    }
    sa = sb;
    fa = fb;
  }
  return roots;
}

TriangleLagrange::TriangleLagrange(int order) : order_(order) {
  if (order < 1) throw std::invalid_argument("TriangleLagrange: order must be >= 1");
  const int k = order;
  multi_.push_back({k, 0, 0});
  multi_.push_back({0, k, 0});
  multi_.push_back({0, 0, k});
  // edge e opposite vertex e, walking from vertex (e+1)%3 to (e+2)%3
  for (int e = 0; e < 3; ++e) {
    const int a = (e + 1) % 3, b = (e + 2) % 3;
    for (int s = 1; s < k; ++s) {
      std::array<int, 3> m{0, 0, 0};
      m[a] = k - s;
      m[b] = s;
      multi_.push_back(m);
    }
  }
  for (int i = 1; i < k; ++i)
    for (int j = 1; i + j < k; ++j) multi_.push_back({k - i - j, i, j});
}

Vec2 TriangleLagrange::node(int i) const {
  const auto& m = multi_[i];
  return Vec2(static_cast<double>(m[1]) / order_, static_cast<double>(m[2]) / order_);
}

namespace {

// prod_{r<a} (k*l - r)/(r+1) and its derivative in l.
void factor(int k, int a, double l, double& f, double& df) {
  f = 1.0;
  df = 0.0;
  for (int r = 0; r < a; ++r) {
    const double term = (k * l - r) / (r + 1.0);
    const double dterm = k / (r + 1.0);
    df = df * term + f * dterm;
    f *= term;
  }
}

}  // namespace

void TriangleLagrange::eval(const Vec2& ref, std::span<double> values) const {
  const double lam[3] = {1.0 - ref[0] - ref[1], ref[0], ref[1]};
  for (int i = 0; i < size(); ++i) {
    double v = 1.0;
    for (int l = 0; l < 3; ++l) {
      double f, df;
      factor(order_, multi_[i][l], lam[l], f, df);
      v *= f;
    }
    values[i] = v;
  }
}

void TriangleLagrange::eval_with_gradients(const Vec2& ref, std::span<double> values,
                                           std::span<Vec2> grads) const {
  const double lam[3] = {1.0 - ref[0] - ref[1], ref[0], ref[1]};
  for (int i = 0; i < size(); ++i) {
    double f[3], df[3];
    for (int l = 0; l < 3; ++l) factor(order_, multi_[i][l], lam[l], f[l], df[l]);
    values[i] = f[0] * f[1] * f[2];
    const double d0 = df[0] * f[1] * f[2];
    const double d1 = f[0] * df[1] * f[2];
    const double d2 = f[0] * f[1] * df[2];
    grads[i] = Vec2(d1 - d0, d2 - d0);
  }
}

std::vector<TrianglePoint> triangle_rule(int n) {
  const Rule1D g = gauss_legendre(n);
  // Duffy collapse of the unit square: xi = u, eta = (1-u) v
  std::vector<TrianglePoint> pts;
  pts.reserve(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double u = g.nodes[i], v = g.nodes[j];
      pts.push_back({Vec2(u, (1.0 - u) * v), g.weights[i] * g.weights[j] * (1.0 - u)});
    }
  return pts;
}

}  // namespace sttrace
