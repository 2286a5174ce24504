#include "sttrace/levelset.hpp"

#include <algorithm>
#include <cmath>

#include "sttrace/error.hpp"

namespace sttrace {

DiscreteLevelSet::DiscreteLevelSet(const Triangulation& mesh,
                                   std::shared_ptr<const LagrangeNodes> nodes, int slab,
                                   std::array<double, 2> interval, int kgq,
                                   std::vector<double> values)
    : mesh_(&mesh),
      nodes_(std::move(nodes)),
      slab_(slab),
      t0_(interval[0]),
      t1_(interval[1]),
      kgq_(kgq),
      time_basis_(temporal_nodes(kgq)),
      values_(std::move(values)) {
  if (kgq < 1 || nodes_->order() < 1) throw ConfigError("level set orders must be >= 1");
  const int nt = num_time_nodes();
  for (int v = 0; v < mesh.num_vertices(); ++v)
    for (int m = 0; m < nt; ++m) lin_scale_ = std::max(lin_scale_, std::abs(values_[v * nt + m]));
}

double DiscreteLevelSet::time_node(int m) const {
  return t0_ + time_basis_.nodes()[m] * (t1_ - t0_);
}

double DiscreteLevelSet::eval(int K, const Vec2& x, double t) const {
  double v, dt;
  Vec2 g;
  eval_grad(K, x, t, v, g, dt);
  return v;
}

void DiscreteLevelSet::eval_grad(int K, const Vec2& x, double t, double& value, Vec2& grad,
                                 double& dphidt) const {
  const int nt = num_time_nodes();
  const auto& basis = nodes_->basis();
  const int npe = basis.size();
  std::array<double, 8> X{}, dX{};
  time_basis_.eval(local_time(t), std::span(X.data(), nt));
  time_basis_.eval_derivative(local_time(t), std::span(dX.data(), nt));
  std::vector<double> psi(npe);
  std::vector<Vec2> dpsi(npe);
  basis.eval_with_gradients(mesh_->to_reference(K, x), psi, dpsi);
  const Mat2 invJT = mesh_->inverse_jacobian(K).transpose();
  value = 0.0;
  dphidt = 0.0;
  Vec2 gref = Vec2::Zero();
  const auto ids = nodes_->element_nodes(K);
  for (int i = 0; i < npe; ++i) {
    double c = 0.0, dc = 0.0;
    for (int m = 0; m < nt; ++m) {
      const double a = nodal_value(ids[i], m);
      c += a * X[m];
      dc += a * dX[m];
    }
    value += c * psi[i];
    dphidt += dc * psi[i];
    gref += c * dpsi[i];
  }
  grad = invJT * gref;
  dphidt /= dt();
}

double DiscreteLevelSet::vertex_value(int v, double t) const {
  const int nt = num_time_nodes();
  std::array<double, 8> X{};
  time_basis_.eval(local_time(t), std::span(X.data(), nt));
  double r = 0.0;
  for (int m = 0; m < nt; ++m) r += nodal_value(v, m) * X[m];
  return r;
}

std::array<double, 3> DiscreteLevelSet::corner_values(int K, double t) const {
  const int nt = num_time_nodes();
  std::array<double, 8> X{};
  time_basis_.eval(local_time(t), std::span(X.data(), nt));
  std::array<double, 3> r{};
  const auto& tri = mesh_->triangle(K);
  for (int c = 0; c < 3; ++c) {
    for (int m = 0; m < nt; ++m) r[c] += nodal_value(tri[c], m) * X[m];
    if (r[c] == 0.0) r[c] = zero_shift();
  }
  return r;
}

void DiscreteLevelSet::eval_lin(int K, const Vec2& x, double t, double& value, Vec2& grad,
                                double& dphidt) const {
  const int nt = num_time_nodes();
  std::array<double, 8> X{}, dX{};
  time_basis_.eval(local_time(t), std::span(X.data(), nt));
  time_basis_.eval_derivative(local_time(t), std::span(dX.data(), nt));
  const auto& tri = mesh_->triangle(K);
  std::array<double, 3> val{}, dval{};
  for (int c = 0; c < 3; ++c)
    for (int m = 0; m < nt; ++m) {
      val[c] += nodal_value(tri[c], m) * X[m];
      dval[c] += nodal_value(tri[c], m) * dX[m];
    }
  const auto b = mesh_->barycentric(K, x);
  value = b[0] * val[0] + b[1] * val[1] + b[2] * val[2];
  dphidt = (b[0] * dval[0] + b[1] * dval[1] + b[2] * dval[2]) / dt();
  grad = mesh_->inverse_jacobian(K).transpose() * Vec2(val[1] - val[0], val[2] - val[0]);
}

Vec2 DiscreteLevelSet::grad_lin(int K, double t) const {
  double v, dt;
  Vec2 g;
  eval_lin(K, mesh_->to_physical(K, Vec2(1.0 / 3.0, 1.0 / 3.0)), t, v, g, dt);
  return g;
}

DiscreteLevelSet interpolate_levelset(const AnalyticScene& scene, const Triangulation& mesh,
                                      std::shared_ptr<const LagrangeNodes> nodes,
                                      const TimeGrid& grid, int n, int kgq) {
  const auto interval = grid.slab(n);
  const std::vector<double> tn = temporal_nodes(kgq);
  const int nt = static_cast<int>(tn.size());
  std::vector<double> values(static_cast<std::size_t>(nodes->size()) * nt);
  std::vector<double> times(nt);
  for (int m = 0; m < nt; ++m) times[m] = interval[0] + tn[m] * (interval[1] - interval[0]);
  // Slab endpoints are taken verbatim so adjacent slabs share nodal values.
  times.front() = interval[0];
  times.back() = interval[1];
  const int count = nodes->size();
#pragma omp parallel for schedule(static)
  for (int p = 0; p < count; ++p)
    for (int m = 0; m < nt; ++m)
      values[static_cast<std::size_t>(p) * nt + m] = scene.phi(nodes->coord(p), times[m]);
  return DiscreteLevelSet(mesh, std::move(nodes), n, interval, kgq, std::move(values));
}

DiscreteLevelSet interpolate_levelset(const AnalyticScene& scene, const Triangulation& mesh,
                                      const TimeGrid& grid, int n, int kgs, int kgq) {
  return interpolate_levelset(scene, mesh, std::make_shared<const LagrangeNodes>(mesh, kgs), grid,
                              n, kgq);
}

LinearNormals eval_normals_lin(const DiscreteLevelSet& ls, int K, const Vec2& x, double t) {
  double v, dt;
  Vec2 g;
  ls.eval_lin(K, x, t, v, g, dt);
  const double ng = g.norm();
  if (!(ng > 1e-14 * std::max(1.0, ls.lin_scale()) / ls.mesh().h()))
    throw DegenerateGradientError("vanishing gradient of the piecewise linear level set");
  LinearNormals r;
  r.n_lin = g / ng;
  const Vec3 gs(g[0], g[1], dt);
  r.n_slin = gs / gs.norm();
  return r;
}

OswaldField oswald_average(const LagrangeNodes& nodes, std::span<const int> elements, int ncomp,
                           std::span<const double> local) {
  const int npe = nodes.nodes_per_element();
  OswaldField f;
  f.values.assign(static_cast<std::size_t>(nodes.size()) * ncomp, 0.0);
  f.counts.assign(nodes.size(), 0);
  for (std::size_t e = 0; e < elements.size(); ++e) {
    const auto ids = nodes.element_nodes(elements[e]);
    for (int i = 0; i < npe; ++i) {
      const double* src = local.data() + (e * npe + i) * ncomp;
      double* dst = f.values.data() + static_cast<std::size_t>(ids[i]) * ncomp;
      for (int c = 0; c < ncomp; ++c) dst[c] += src[c];
      ++f.counts[ids[i]];
    }
  }
  for (int p = 0; p < nodes.size(); ++p)
    if (f.counts[p] > 1)
      for (int c = 0; c < ncomp; ++c) f.values[static_cast<std::size_t>(p) * ncomp + c] /= f.counts[p];
  return f;
}

ImprovedAlpha::ImprovedAlpha(const AnalyticScene& scene, const DiscreteLevelSet& ls,
                             std::span<const int> active)
    : ls_(&ls), nt_(ls.num_time_nodes()) {
  const Triangulation& mesh = ls.mesh();
  const TriangleLagrange fine(ls.kgs() + 1);
  const Lagrange1D fine_time(temporal_nodes(ls.kgq() + 1));
  const TriangleLagrange& coarse = ls.nodes().basis();
  const int nf = fine.size(), nft = fine_time.size(), npe = coarse.size();
  std::vector<double> local(active.size() * npe * nt_);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::size_t e = 0; e < active.size(); ++e) {
    const int K = active[e];
    const Mat2 invJT = mesh.inverse_jacobian(K).transpose();
    std::vector<double> vals(static_cast<std::size_t>(nf) * nft);
    for (int j = 0; j < nf; ++j) {
      const Vec2 x = mesh.to_physical(K, fine.node(j));
      for (int l = 0; l < nft; ++l)
        vals[j * nft + l] = scene.phi(x, ls.t0() + fine_time.nodes()[l] * ls.dt());
    }
    std::vector<double> psi(nf), X(nft), dX(nft);
    std::vector<Vec2> dpsi(nf);
    for (int i = 0; i < npe; ++i) {
      fine.eval_with_gradients(coarse.node(i), psi, dpsi);
      for (int m = 0; m < nt_; ++m) {
        const double s = ls.time_basis().nodes()[m];
        fine_time.eval(s, X);
        fine_time.eval_derivative(s, dX);
        Vec2 gref = Vec2::Zero();
        double dt = 0.0;
        for (int j = 0; j < nf; ++j) {
          double c = 0.0, dc = 0.0;
          for (int l = 0; l < nft; ++l) {
            c += vals[j * nft + l] * X[l];
            dc += vals[j * nft + l] * dX[l];
          }
          gref += c * dpsi[j];
          dt += dc * psi[j];
        }
        const double ng = (invJT * gref).norm();
        const double V = ng > 0.0 ? -dt / ls.dt() / ng : 0.0;
        local[(e * npe + i) * nt_ + m] = std::sqrt(1.0 + V * V);
      }
    }
  }
  field_ = oswald_average(ls.nodes(), active, nt_, local);
}

double ImprovedAlpha::eval(int K, const Vec2& y, double t) const {
  const auto& basis = ls_->nodes().basis();
  const int npe = basis.size();
  std::vector<double> psi(npe);
  basis.eval(ls_->mesh().to_reference(K, y), psi);
  std::array<double, 8> X{};
  ls_->time_basis().eval(ls_->local_time(t), std::span(X.data(), nt_));
  const auto ids = ls_->nodes().element_nodes(K);
  double r = 0.0;
  for (int i = 0; i < npe; ++i)
    for (int m = 0; m < nt_; ++m) r += nodal_value(ids[i], m) * psi[i] * X[m];
  return r;
}

AlphaField AlphaField::improved(const AnalyticScene& scene, const DiscreteLevelSet& ls,
                                std::span<const int> active) {
  AlphaField f;
  f.improved_ = std::make_shared<const ImprovedAlpha>(scene, ls, active);
  return f;
}

double AlphaField::eval(int K, const Vec2& y, double t, double Vh) const {
  if (!improved_) return std::sqrt(1.0 + Vh * Vh);
  return improved_->eval(K, y, t);
}

}  // namespace sttrace
