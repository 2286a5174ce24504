#include "sttrace/femspace.hpp"

#include "sttrace/error.hpp"

namespace sttrace {

TensorBasis::TensorBasis(int ks, int kq) : spatial_(ks), temporal_(temporal_nodes(kq)) {
  if (ks < 1 || kq < 0) throw ConfigError("TensorBasis: need ks >= 1, kq >= 0");
}

void TensorBasis::eval(const Vec2& ref, double s, std::span<double> values,
                       std::span<Vec3> grads) const {
  const int ns = spatial_.size(), nt = temporal_.size();
  std::vector<double> psi(ns), X(nt), dX(nt);
  std::vector<Vec2> dpsi(ns);
  spatial_.eval_with_gradients(ref, psi, dpsi);
  temporal_.eval(s, X);
  temporal_.eval_derivative(s, dX);
  for (int a = 0; a < ns; ++a)
    for (int m = 0; m < nt; ++m) {
      const int i = a * nt + m;
      values[i] = psi[a] * X[m];
      grads[i] = Vec3(dpsi[a][0] * X[m], dpsi[a][1] * X[m], psi[a] * dX[m]);
    }
}

DofMap::DofMap(const Triangulation& mesh, const CutTopologySlab& topo,
               std::shared_ptr<const LagrangeNodes> nodes, int kq)
    : mesh_(&mesh),
      nodes_(std::move(nodes)),
      basis_(nodes_->order(), kq),
      slab_(topo.slab()),
      t0_(topo.t0()),
      t1_(topo.t1()),
      nt_(kq + 1),
      elements_(topo.active()),
      spatial_of_node_(nodes_->size(), -1) {
  for (int K : elements_)
    for (int p : nodes_->element_nodes(K))
      if (spatial_of_node_[p] < 0) {
        spatial_of_node_[p] = num_spatial_++;
        node_of_spatial_.push_back(p);
      }
}

void DofMap::element_dofs(int e, std::span<int> dofs) const {
  const auto ids = nodes_->element_nodes(elements_[e]);
  for (std::size_t a = 0; a < ids.size(); ++a)
    for (int m = 0; m < nt_; ++m) dofs[a * nt_ + m] = dof(spatial_of_node_[ids[a]], m);
}

void DofMap::eval_basis(int e, const Vec2& x, double t, BasisValues& out) const {
  const int K = elements_[e];
  const int n = basis_.size();
  out.v.resize(n);
  out.gx.resize(n);
  out.gt.resize(n);
  std::vector<Vec3> g(n);
  const double dt = t1_ - t0_;
  basis_.eval(mesh_->to_reference(K, x), (t - t0_) / dt, out.v, g);
  const Mat2 invJT = mesh_->inverse_jacobian(K).transpose();
  for (int i = 0; i < n; ++i) {
    out.gx[i] = invJT * g[i].head<2>();
    out.gt[i] = g[i][2] / dt;
  }
}

FEValue eval_fe(const FEFunction& fn, const DofMap& dofmap, int e, const Vec2& x, double t,
                const SpaceTimeDeformation* def) {
  BasisValues bv;
  dofmap.eval_basis(e, x, t, bv);
  std::vector<int> dofs(bv.v.size());
  dofmap.element_dofs(e, dofs);
  FEValue r;
  for (std::size_t i = 0; i < dofs.size(); ++i) {
    const double c = fn.coeffs[dofs[i]];
    r.value += c * bv.v[i];
    r.grad += c * bv.gx[i];
    r.dt += c * bv.gt[i];
  }
  if (def && !def->is_identity()) {
    const DeformationEval ev = def->eval(dofmap.element_triangle(e), x, t);
    const Vec2 g = ev.D.inverse().transpose() * r.grad;
    r.dt -= g.dot(ev.dtheta);
    r.grad = g;
  }
  return r;
}

FEValue eval_fe_at(const FEFunction& fn, const DofMap& dofmap, const CutTopologySlab& topo,
                   const Vec2& x, double t) {
  const int K = dofmap.mesh().locate(x, -1, [&](int k) { return topo.is_active(k); });
  if (K < 0) throw LookupError("point outside the active region");
  return eval_fe(fn, dofmap, topo.local_index(K), x, t);
}

FEFunction interpolate_fe(const DofMap& dofmap,
                          const std::function<double(const Vec2&, double)>& g) {
  FEFunction f{dofmap.slab(), Eigen::VectorXd::Zero(dofmap.num_dofs())};
  const auto& tn = dofmap.basis().temporal().nodes();
  const double dt = dofmap.t1() - dofmap.t0();
  for (int sid = 0; sid < dofmap.num_spatial(); ++sid) {
    const Vec2& x = dofmap.nodes().coord(dofmap.spatial_node(sid));
    for (int m = 0; m <= dofmap.kq(); ++m) f.coeffs[dofmap.dof(sid, m)] = g(x, dofmap.t0() + tn[m] * dt);
  }
  return f;
}

}  // namespace sttrace
