#include "sttrace/assembly.hpp"

#include <cmath>
#include <exception>

#include "sttrace/error.hpp"

namespace sttrace {

void MethodParams::validate() const {
  if (ks < 1 || kq < 0 || kgs < 1 || kgq < 1) throw ConfigError("orders must be >= 1");
  if (ks > 5 || kgs > 5 || kq > 5 || kgq > 5) throw ConfigError("orders above 5 are not supported");
  if (!(beta >= 0.0 && beta <= 1.0)) throw ConfigError("beta must lie in [0, 1]");
  if (!(mu_d > 0.0)) throw ConfigError("mu_d must be positive");
}

SlabQuadratures build_slab_quadratures(const MethodParams& params, const CutTopologySlab& topo,
                                       const DiscreteLevelSet& ls, int refine) {
  SlabQuadratures q;
  const int L = params.temporal_points() + 2 * refine;
  const int qs = params.segment_points() + refine;
  q.surface = build_surface_quadrature(topo, ls, L, qs);
  q.bottom = build_slice_quadrature(topo, ls, topo.t0(), qs);
  q.top = build_slice_quadrature(topo, ls, topo.t1(), qs);
  q.prism = build_prism_quadrature(topo, ls.mesh(), params.ks + 1 + refine, params.kq + 1 + refine);
  return q;
}

double eval_R(RMode mode, const MappedPointData& md, const Vec2& w) {
  if (mode == RMode::One) return 1.0;
  return (md.Vh * w.dot(md.n_h) + 1.0) / (md.alpha * std::sqrt(1.0 + md.Vh * md.Vh));
}

double manufactured_source(const AnalyticScene& scene, const Vec2& x, double t, double mu_d) {
  const Jet u = scene.u_jet(x, t);
  const PhiDerivs ph = scene.phi_derivs(x, t);
  Vec2 w;
  Mat2 gw;
  scene.velocity(x, t, w, gw);
  const double ng = ph.grad.norm();
  if (!(ng > 0.0)) throw DegenerateGradientError("manufactured_source: grad phi vanishes");
  const Vec2 n = ph.grad / ng;
  const Mat2 P = Mat2::Identity() - n * n.transpose();
  const Vec2 gu = u.g.head<2>();
  const Mat2 Hu = u.H.topLeftCorner<2, 2>();
  const double lap = (P * Hu).trace() - n.dot(gu) * (P * ph.hess).trace() / ng;
  return u.g[2] + w.dot(gu) + u.v * (P * gw).trace() - mu_d * lap;
}

ElementBlock assemble_element(const MethodParams& params, const SlabContext& ctx,
                              const TraceFn& prev, int e, unsigned terms) {
  const DofMap& dm = *ctx.dofmap;
  const DiscreteLevelSet& ls = *ctx.ls;
  const SpaceTimeDeformation& def = *ctx.def;
  const AnalyticScene& scene = *ctx.scene;
  const int K = dm.element_triangle(e);
  const int n = dm.basis().size();
  ElementBlock blk;
  blk.dofs.resize(n);
  dm.element_dofs(e, blk.dofs);
  blk.A = Eigen::MatrixXd::Zero(n, n);
  blk.b = Eigen::VectorXd::Zero(n);
  const double beta = params.beta;
  const bool source = (terms & kSource) && scene.has_exact_solution();
  BasisValues bv;
  std::vector<Vec2> g(n), tg(n);
  std::vector<double> mat(n);
  Eigen::VectorXd v(n);

  if (terms & (kTransport | kReaction | kDiffusion | kSource)) {
    for (const SurfacePoint& p : ctx.quad->surface.element(e)) {
      const MappedPointData md = map_point(ls, def, *ctx.alpha, K, p.x, p.t);
      dm.eval_basis(e, p.x, p.t, bv);
      Vec2 w;
      Mat2 gw;
      scene.velocity(md.image, p.t, w, gw);
      const Mat3 PS = Mat3::Identity() - md.n_sh * md.n_sh.transpose();
      const Vec3 pw = PS * Vec3(w[0], w[1], 1.0);
      const Mat2 Ph = Mat2::Identity() - md.n_h * md.n_h.transpose();
      const double divw = (Ph * gw).trace();
      for (int i = 0; i < n; ++i) {
        v[i] = bv.v[i];
        g[i] = md.DsInvT * bv.gx[i];
        const double gt = bv.gt[i] - g[i].dot(md.dtheta);
        mat[i] = pw.head<2>().dot(g[i]) + pw[2] * gt;
        tg[i] = Ph * g[i];
      }
      const double wt = p.weight * md.J_alpha;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          double a = 0.0;
          if (terms & kTransport) a += (1.0 - beta) * mat[j] * v[i] - beta * v[j] * mat[i];
          if (terms & kReaction) a += (1.0 - beta) * v[i] * v[j] * divw;
          if (terms & kDiffusion) a += params.mu_d * tg[i].dot(tg[j]);
          blk.A(i, j) += wt * a;
        }
      if (source) {
        const double meas = p.weight * std::abs(md.det) * md.nanson;
        const double f = manufactured_source(scene, md.image, p.t, params.mu_d);
        blk.b += meas * f * v;
      }
    }
  }

  if (terms & (kBoundary | kTransfer)) {
    for (int side = 0; side < 2; ++side) {
      const SurfaceQuadrature& sq = side == 0 ? ctx.quad->bottom : ctx.quad->top;
      const double coeff = side == 0 ? 1.0 - beta : beta;
      for (const SurfacePoint& p : sq.element(e)) {
        const MappedPointData md = map_point(ls, def, *ctx.alpha, K, p.x, p.t);
        dm.eval_basis(e, p.x, p.t, bv);
        for (int i = 0; i < n; ++i) v[i] = bv.v[i];
        double R = 1.0;
        if (params.r_mode == RMode::Weighted) R = eval_R(params.r_mode, md, scene.w(md.image, p.t));
        const double meas = p.weight * std::abs(md.det) * md.nanson * R;
        if ((terms & kBoundary) && coeff != 0.0) blk.A.noalias() += (coeff * meas) * v * v.transpose();
        if (side == 0 && (terms & kTransfer) && prev) blk.b += meas * prev(K, p.x) * v;
      }
    }
  }

  if (terms & kStabilization) {
    const double xi = params.xi(ls.mesh().h());
    for (const PrismPoint& p : ctx.quad->prism.element(e)) {
      const DeformationEval ev = def.eval(K, p.x, p.t);
      const Mat2 DsInvT = ev.D.inverse().transpose();
      const Vec2 a = DsInvT * ls.grad_lin(K, p.t);
      const double na = a.norm();
      if (!(na > 1e-14 * std::max(1.0, ls.lin_scale()))) continue;
      const Vec2 nh = a / na;
      dm.eval_basis(e, p.x, p.t, bv);
      for (int i = 0; i < n; ++i) v[i] = nh.dot(DsInvT * bv.gx[i]);
      blk.A.noalias() += (xi * p.weight * std::abs(ev.D.determinant())) * v * v.transpose();
    }
  }
  return blk;
}

namespace {

SlabSystem scatter(const std::vector<ElementBlock>& blocks, int ndofs) {
  std::vector<Eigen::Triplet<double>> trip;
  std::size_t nnz = 0;
  for (const auto& b : blocks) nnz += b.dofs.size() * b.dofs.size();
  trip.reserve(nnz);
  SlabSystem sys;
  sys.b = Eigen::VectorXd::Zero(ndofs);
  for (const auto& blk : blocks) {
    const int n = static_cast<int>(blk.dofs.size());
    for (int i = 0; i < n; ++i) {
      sys.b[blk.dofs[i]] += blk.b[i];
      for (int j = 0; j < n; ++j) trip.emplace_back(blk.dofs[i], blk.dofs[j], blk.A(i, j));
    }
  }
  sys.A.resize(ndofs, ndofs);
  sys.A.setFromTriplets(trip.begin(), trip.end());
  return sys;
}

}  // namespace

SlabSystem assemble_slab(const MethodParams& params, const SlabContext& ctx, const TraceFn& prev,
                         unsigned terms) {
  const int ne = ctx.dofmap->num_elements();
  std::vector<ElementBlock> blocks(ne);
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 8)
  for (int e = 0; e < ne; ++e) {
    try {
      blocks[e] = assemble_element(params, ctx, prev, e, terms);
    } catch (...) {
#pragma omp critical(sttrace_assembly_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return scatter(blocks, ctx.dofmap->num_dofs());
}

SlabSystem assemble_slab_serial(const MethodParams& params, const SlabContext& ctx,
                                const TraceFn& prev, unsigned terms) {
  const int ne = ctx.dofmap->num_elements();
  std::vector<ElementBlock> blocks(ne);
  for (int e = 0; e < ne; ++e) blocks[e] = assemble_element(params, ctx, prev, e, terms);
  return scatter(blocks, ctx.dofmap->num_dofs());
}

SpatialTrace::SpatialTrace(const Triangulation& mesh, std::shared_ptr<const LagrangeNodes> nodes,
                           std::vector<double> values)
    : mesh_(&mesh), nodes_(std::move(nodes)), values_(std::move(values)) {}

double SpatialTrace::eval(int K, const Vec2& x) const {
  const auto& basis = nodes_->basis();
  std::array<double, 32> psi{};
  basis.eval(mesh_->to_reference(K, x), std::span(psi.data(), basis.size()));
  const auto ids = nodes_->element_nodes(K);
  double r = 0.0;
  for (int i = 0; i < basis.size(); ++i) r += values_[ids[i]] * psi[i];
  return r;
}

SpatialTrace parametric_initial_condition(const AnalyticScene& scene,
                                          const SpaceTimeDeformation& def,
                                          const CutTopologySlab& topo,
                                          std::shared_ptr<const LagrangeNodes> nodes) {
  const Triangulation& mesh = def.mesh();
  std::vector<double> values(nodes->size(), 0.0);
  std::vector<char> done(nodes->size(), 0);
  const auto& basis = nodes->basis();
  for (int K : topo.active()) {
    const auto ids = nodes->element_nodes(K);
    for (int i = 0; i < basis.size(); ++i) {
      if (done[ids[i]]) continue;
      done[ids[i]] = 1;
      const Vec2 p = mesh.to_physical(K, basis.node(i));
      values[ids[i]] = scene.u0(def.image(K, p, topo.t0()));
    }
  }
  return SpatialTrace(mesh, std::move(nodes), std::move(values));
}

}  // namespace sttrace
