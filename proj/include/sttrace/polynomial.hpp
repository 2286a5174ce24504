#pragma once

#include <array>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace sttrace {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;

/// One-dimensional quadrature rule on [0, 1].
struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre rule with n points on [0, 1] (exact to degree 2n-1).
Rule1D gauss_legendre(int n);

/// Gauss-Lobatto rule with n >= 2 points on [0, 1] (endpoints included).
Rule1D gauss_lobatto(int n);

/// Nodes used for temporal Lagrange bases of degree q on [0, 1]:
/// Gauss-Lobatto for q >= 1, the midpoint for q = 0.
std::vector<double> temporal_nodes(int degree);

/// Lagrange basis on [0, 1] through the given nodes.
class Lagrange1D {
 public:
  Lagrange1D() = default;
  explicit Lagrange1D(std::vector<double> nodes);

  int size() const { return static_cast<int>(nodes_.size()); }
  int degree() const { return size() - 1; }
  const std::vector<double>& nodes() const { return nodes_; }

  void eval(double s, std::span<double> values) const;
  void eval_derivative(double s, std::span<double> derivs) const;

 private:
  std::vector<double> nodes_;
  std::vector<double> denom_;
};

/// Roots of the polynomial sum_m c_m X_m(s) inside the open interval (0, 1),
/// found by sampling sign changes and bisecting to `tol`. Sorted ascending.
std::vector<double> interpolant_roots(const Lagrange1D& basis, std::span<const double> coeffs,
                                      double tol);

/// Equispaced Lagrange basis of degree k on the reference triangle
/// (0,0), (1,0), (0,1).
///
/// Local nodes are ordered: the three vertices, then the k-1 nodes of each
/// edge (edge e opposite vertex e), then the interior nodes.
class TriangleLagrange {
 public:
  TriangleLagrange() = default;
  explicit TriangleLagrange(int order);

  int order() const { return order_; }
  int size() const { return static_cast<int>(multi_.size()); }

  /// Barycentric multi-index (a0, a1, a2), a0 + a1 + a2 = k, of local node i.
  const std::array<int, 3>& multi_index(int i) const { return multi_[i]; }
  Vec2 node(int i) const;

  void eval(const Vec2& ref, std::span<double> values) const;
  /// Values and reference gradients (d/dxi, d/deta).
  void eval_with_gradients(const Vec2& ref, std::span<double> values, std::span<Vec2> grads) const;

 private:
  int order_ = 0;
  std::vector<std::array<int, 3>> multi_;
};

/// Quadrature point on the reference triangle.
struct TrianglePoint {
  Vec2 ref;
  double weight;  // sums to 1/2
};

/// Collapsed Gauss rule with n points per direction (exact to degree 2n-2),
/// all weights positive.
std::vector<TrianglePoint> triangle_rule(int n);

}  // namespace sttrace
