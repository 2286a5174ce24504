#include <cmath>
#include <vector>

#include <doctest.h>

#include "sttrace/polynomial.hpp"

using namespace sttrace;

namespace {

double factorial(int n) { return std::tgamma(n + 1.0); }

}  // namespace

TEST_CASE("gauss_legendre integrates x^(2n-1) exactly on [0,1]") {
  for (int n = 1; n <= 8; ++n) {
    const Rule1D r = gauss_legendre(n);
    REQUIRE(r.nodes.size() == static_cast<std::size_t>(n));
    for (int p = 0; p <= 2 * n - 1; ++p) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += r.weights[i] * std::pow(r.nodes[i], p);
      CHECK(s == doctest::Approx(1.0 / (p + 1)).epsilon(1e-13));
    }
  }
}

TEST_CASE("gauss_lobatto includes the endpoints and integrates x^(2n-3)") {
  for (int n = 2; n <= 6; ++n) {
    const Rule1D r = gauss_lobatto(n);
    CHECK(r.nodes.front() == doctest::Approx(0.0));
    CHECK(r.nodes.back() == doctest::Approx(1.0));
    for (int p = 0; p <= 2 * n - 3; ++p) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += r.weights[i] * std::pow(r.nodes[i], p);
      CHECK(s == doctest::Approx(1.0 / (p + 1)).epsilon(1e-13));
    }
  }
}

TEST_CASE("temporal nodes") {
  CHECK(temporal_nodes(0) == std::vector<double>{0.5});
  const auto q2 = temporal_nodes(2);
  REQUIRE(q2.size() == 3);
  CHECK(q2[1] == doctest::Approx(0.5));
}

TEST_CASE("Lagrange1D is a nodal partition of unity with correct derivatives") {
  const Lagrange1D b(temporal_nodes(3));
  std::vector<double> v(4), d(4), vp(4), vm(4);
  for (int i = 0; i < 4; ++i) {
    b.eval(b.nodes()[i], v);
    for (int j = 0; j < 4; ++j) CHECK(v[j] == doctest::Approx(i == j ? 1.0 : 0.0));
  }
  for (double s : {0.13, 0.5, 0.91}) {
    b.eval(s, v);
    b.eval_derivative(s, d);
    b.eval(s + 1e-6, vp);
    b.eval(s - 1e-6, vm);
    double sum = 0.0, dsum = 0.0;
    for (int j = 0; j < 4; ++j) {
      sum += v[j];
      dsum += d[j];
      CHECK(d[j] == doctest::Approx((vp[j] - vm[j]) / 2e-6).epsilon(1e-6));
    }
    CHECK(sum == doctest::Approx(1.0));
    CHECK(std::abs(dsum) < 1e-12);
  }
}

TEST_CASE("interpolant_roots finds both roots of a quadratic") {
  const Lagrange1D b(temporal_nodes(2));
  std::vector<double> c;
  for (double s : b.nodes()) c.push_back((s - 0.3) * (s - 0.7));
  const auto roots = interpolant_roots(b, c, 1e-14);
  REQUIRE(roots.size() == 2);
  CHECK(roots[0] == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(roots[1] == doctest::Approx(0.7).epsilon(1e-12));
  std::vector<double> positive;
  for (double s : b.nodes()) positive.push_back(1.0 + s * s);
  CHECK(interpolant_roots(b, positive, 1e-14).empty());
}

TEST_CASE("TriangleLagrange: Kronecker property, partition of unity, reproduction") {
  for (int k = 1; k <= 3; ++k) {
    const TriangleLagrange b(k);
    CHECK(b.size() == (k + 1) * (k + 2) / 2);
    std::vector<double> v(b.size());
    std::vector<Vec2> g(b.size());
    for (int i = 0; i < b.size(); ++i) {
      b.eval(b.node(i), v);
      for (int j = 0; j < b.size(); ++j) CHECK(v[j] == doctest::Approx(i == j ? 1.0 : 0.0));
    }
    const Vec2 p(0.21, 0.37);
    b.eval_with_gradients(p, v, g);
    double sum = 0.0, interp = 0.0;
    Vec2 gsum = Vec2::Zero(), ginterp = Vec2::Zero();
    for (int j = 0; j < b.size(); ++j) {
      const Vec2 xj = b.node(j);
      const double pj = std::pow(xj[0], k) + (k >= 2 ? xj[0] * xj[1] : xj[1]);
      sum += v[j];
      gsum += g[j];
      interp += v[j] * pj;
      ginterp += g[j] * pj;
    }
    CHECK(sum == doctest::Approx(1.0));
    CHECK(gsum.norm() < 1e-12);
    CHECK(interp == doctest::Approx(std::pow(p[0], k) + (k >= 2 ? p[0] * p[1] : p[1])));
    if (k >= 2) {
      CHECK(ginterp[0] == doctest::Approx(k * std::pow(p[0], k - 1) + p[1]));
      CHECK(ginterp[1] == doctest::Approx(p[0]));
    }
  }
}

TEST_CASE("triangle_rule is exact to degree 2n-2 with positive weights") {
  for (int n = 1; n <= 6; ++n) {
    const auto rule = triangle_rule(n);
    for (const auto& q : rule) CHECK(q.weight > 0.0);
    for (int a = 0; a <= 2 * n - 2; ++a) {
      for (int b = 0; a + b <= 2 * n - 2; ++b) {
        double s = 0.0;
        for (const auto& q : rule) s += q.weight * std::pow(q.ref[0], a) * std::pow(q.ref[1], b);
        const double exact = factorial(a) * factorial(b) / factorial(a + b + 2);
        CHECK(s == doctest::Approx(exact).epsilon(1e-12));
      }
    }
  }
}
