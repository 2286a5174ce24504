#pragma once

#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Sparse>

#include "sttrace/femspace.hpp"

namespace sttrace {

enum class XiMode { H, InvH };
enum class RMode { Weighted, One };

struct MethodParams {
  int ks = 1, kq = 1, kgs = 1, kgq = 1;
  double beta = 0.0;
  XiMode xi_mode = XiMode::H;
  AlphaMode alpha = AlphaMode::Simple;
  RMode r_mode = RMode::Weighted;
  double mu_d = 1.0;
  int L = 0;    // temporal points per window; 0 selects 2 kq + 2
  int q_s = 0;  // points per cut segment; 0 selects ks + 1

  int temporal_points() const { return L > 0 ? L : 2 * kq + 2; }
  int segment_points() const { return q_s > 0 ? q_s : ks + 1; }
  double xi(double h) const { return xi_mode == XiMode::H ? h : 1.0 / h; }
  /// Throws ConfigError on orders < 1 or beta outside [0, 1].
  void validate() const;
};

/// Selects parts of the slab system (for isolating terms in tests).
enum Term : unsigned {
  kTransport = 1u,       // material-derivative terms
  kReaction = 2u,        // u v div w
  kDiffusion = 4u,
  kBoundary = 8u,        // R-weighted slab-boundary terms
  kStabilization = 16u,
  kSource = 32u,
  kTransfer = 64u,
  kAllTerms = 127u,
};

struct SlabQuadratures {
  SurfaceQuadrature surface;
  SurfaceQuadrature bottom;  // Gamma_lin(t_{n-1})
  SurfaceQuadrature top;     // Gamma_lin(t_n)
  PrismQuadrature prism;
};

/// Assembly rules (refine > 0 raises every order by that amount, used for norms).
SlabQuadratures build_slab_quadratures(const MethodParams& params, const CutTopologySlab& topo,
                                       const DiscreteLevelSet& ls, int refine = 0);

/// Everything the slab assembly reads. All members must outlive the call.
struct SlabContext {
  const AnalyticScene* scene = nullptr;
  const DiscreteLevelSet* ls = nullptr;
  const CutTopologySlab* topo = nullptr;
  const SpaceTimeDeformation* def = nullptr;
  const AlphaField* alpha = nullptr;
  const DofMap* dofmap = nullptr;
  const SlabQuadratures* quad = nullptr;
};

/// Previous-slab trace u_-^{n-1} o Theta^{n-1} at reference point x of triangle K.
using TraceFn = std::function<double(int tri, const Vec2& x)>;

struct SlabSystem {
  Eigen::SparseMatrix<double, Eigen::RowMajor> A;
  Eigen::VectorXd b;
};

struct ElementBlock {
  std::vector<int> dofs;
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
};

/// Boundary weight R = (w . (V_h n_h) + 1) / (alpha_h sqrt(1 + V_h^2)), or 1.
double eval_R(RMode mode, const MappedPointData& md, const Vec2& w);

/// f = u_t + w . grad u + u tr(P grad w) - mu_d Delta_Gamma u from the
/// analytic extension of the exact solution.
double manufactured_source(const AnalyticScene& scene, const Vec2& x, double t, double mu_d);

ElementBlock assemble_element(const MethodParams& params, const SlabContext& ctx,
                              const TraceFn& prev, int e, unsigned terms = kAllTerms);

/// Element blocks computed in parallel, scattered in element order.
SlabSystem assemble_slab(const MethodParams& params, const SlabContext& ctx, const TraceFn& prev,
                         unsigned terms = kAllTerms);
/// Single-threaded reference of assemble_slab.
SlabSystem assemble_slab_serial(const MethodParams& params, const SlabContext& ctx,
                                const TraceFn& prev, unsigned terms = kAllTerms);

/// Spatial FE function on the degree-k_s Lagrange nodes of the active elements.
class SpatialTrace {
 public:
  SpatialTrace(const Triangulation& mesh, std::shared_ptr<const LagrangeNodes> nodes,
               std::vector<double> values);
  double eval(int K, const Vec2& x) const;
  const std::vector<double>& values() const { return values_; }

 private:
  const Triangulation* mesh_;
  std::shared_ptr<const LagrangeNodes> nodes_;
  std::vector<double> values_;
};

/// Nodal interpolation of u0 o Theta(., 0) on the first slab's active elements.
SpatialTrace parametric_initial_condition(const AnalyticScene& scene,
                                          const SpaceTimeDeformation& def,
                                          const CutTopologySlab& topo,
                                          std::shared_ptr<const LagrangeNodes> nodes);

}  // namespace sttrace
