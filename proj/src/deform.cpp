#include "sttrace/deform.hpp"

#include <algorithm>
#include <cmath>

#include "sttrace/error.hpp"

namespace sttrace {

SpaceTimeDeformation::SpaceTimeDeformation(const DiscreteLevelSet& ls)
    : mesh_(&ls.mesh()),
      nodes_(ls.shared_nodes()),
      slab_(ls.slab()),
      t0_(ls.t0()),
      t1_(ls.t1()),
      time_basis_(ls.time_basis()) {}

SpaceTimeDeformation::SpaceTimeDeformation(const DiscreteLevelSet& ls,
                                           std::vector<std::vector<Vec2>> displacement,
                                           int fallback_elements)
    : SpaceTimeDeformation(ls) {
  disp_ = std::move(displacement);
  fallback_ = fallback_elements;
}

DeformationEval SpaceTimeDeformation::eval(int K, const Vec2& x, double t) const {
  DeformationEval r{x, Mat2::Identity(), Vec2::Zero()};
  if (is_identity()) return r;
  const auto& basis = nodes_->basis();
  const int npe = basis.size(), nt = num_time_nodes();
  std::array<double, 32> psi{};
  std::array<Vec2, 32> dpsi;
  basis.eval_with_gradients(mesh_->to_reference(K, x), std::span(psi.data(), npe),
                            std::span(dpsi.data(), npe));
  std::array<double, 8> X{}, dX{};
  const double s = (t - t0_) / (t1_ - t0_);
  time_basis_.eval(s, std::span(X.data(), nt));
  time_basis_.eval_derivative(s, std::span(dX.data(), nt));
  const Mat2 invJT = mesh_->inverse_jacobian(K).transpose();
  const auto ids = nodes_->element_nodes(K);
  for (int i = 0; i < npe; ++i) {
    Vec2 d = Vec2::Zero(), dd = Vec2::Zero();
    for (int m = 0; m < nt; ++m) {
      d += X[m] * disp_[m][ids[i]];
      dd += dX[m] * disp_[m][ids[i]];
    }
    r.image += psi[i] * d;
    r.dtheta += psi[i] * dd;
    r.D += d * (invJT * dpsi[i]).transpose();
  }
  r.dtheta /= (t1_ - t0_);
  return r;
}

namespace {

// Safeguarded Newton for phi_h^K(p + d G, tau) = target with |d| <= bound.
double lift_distance(const DiscreteLevelSet& ls, int K, const Vec2& p, const Vec2& G, double tau,
                     double target, double bound) {
  auto F = [&](double d, double& dF) {
    double v, dt;
    Vec2 g;
    ls.eval_grad(K, p + d * G, tau, v, g, dt);
    dF = g.dot(G);
    return v - target;
  };
  const double ftol = 1e-15 * std::max(1.0, ls.lin_scale());
  double dF;
  double f = F(0.0, dF);
  if (std::abs(f) <= ftol) return 0.0;
  double lo = -bound, hi = bound, dlo, dhi;
  double flo = F(lo, dlo), fhi = F(hi, dhi);
  if ((flo < 0.0) == (fhi < 0.0)) return 0.0;
  double d = 0.0;
  for (int it = 0; it < 100; ++it) {
    if ((f < 0.0) == (flo < 0.0)) {
      lo = d;
      flo = f;
    } else {
      hi = d;
      fhi = f;
    }
    double next = dF != 0.0 ? d - f / dF : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const bool small_step = std::abs(next - d) <= 1e-15 * bound;
    d = next;
    f = F(d, dF);
    if (small_step || std::abs(f) <= ftol) break;
  }
  return d;
}

}  // namespace

SpaceTimeDeformation build_deformation(const DiscreteLevelSet& ls, const CutTopologySlab& topo) {
  if (ls.kgs() == 1 || topo.empty()) return SpaceTimeDeformation(ls);
  const Triangulation& mesh = ls.mesh();
  const LagrangeNodes& nodes = ls.nodes();
  const auto& basis = nodes.basis();
  const int npe = basis.size(), nt = ls.num_time_nodes();
  const int ncomp = 2 * nt;
  const auto& active = topo.active();
  const double bound = 0.5 * mesh.h();
  std::vector<double> local(active.size() * npe * ncomp, 0.0);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::size_t e = 0; e < active.size(); ++e) {
    const int K = active[e];
    for (int m = 0; m < nt; ++m) {
      const double tau = ls.time_node(m);
      Vec2 G = ls.grad_lin(K, tau);
      if (G.norm() == 0.0) continue;
      G.normalize();
      for (int i = 0; i < npe; ++i) {
        const Vec2 p = mesh.to_physical(K, basis.node(i));
        double target, dt;
        Vec2 g;
        ls.eval_lin(K, p, tau, target, g, dt);
        const Vec2 d = lift_distance(ls, K, p, G, tau, target, bound) * G;
        double* out = local.data() + (e * npe + i) * ncomp + 2 * m;
        out[0] = d[0];
        out[1] = d[1];
      }
    }
  }
  const OswaldField avg = oswald_average(nodes, active, ncomp, local);
  std::vector<std::vector<Vec2>> disp(nt, std::vector<Vec2>(nodes.size(), Vec2::Zero()));
  for (int p = 0; p < nodes.size(); ++p)
    for (int m = 0; m < nt; ++m)
      disp[m][p] = Vec2(avg.values[static_cast<std::size_t>(p) * ncomp + 2 * m],
                        avg.values[static_cast<std::size_t>(p) * ncomp + 2 * m + 1]);

  // Inversion check at the nodes and centroid; offending elements are reset
  // to the identity until every deformed element is positively oriented.
  std::vector<Vec2> probes;
  for (int i = 0; i < npe; ++i) probes.push_back(basis.node(i));
  probes.emplace_back(1.0 / 3.0, 1.0 / 3.0);
  std::vector<char> reset(active.size(), 0);
  int fallback = 0;
  std::vector<double> psi(npe);
  std::vector<Vec2> dpsi(npe);
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t e = 0; e < active.size(); ++e) {
      const int K = active[e];
      const auto ids = nodes.element_nodes(K);
      const Mat2 invJT = mesh.inverse_jacobian(K).transpose();
      bool bad = false;
      for (int m = 0; m < nt && !bad; ++m)
        for (const Vec2& r : probes) {
          basis.eval_with_gradients(r, psi, dpsi);
          Mat2 D = Mat2::Identity();
          for (int i = 0; i < npe; ++i) D += disp[m][ids[i]] * (invJT * dpsi[i]).transpose();
          if (D.determinant() <= 0.0) {
            bad = true;
            break;
          }
        }
      if (!bad) continue;
      for (int m = 0; m < nt; ++m)
        for (int i = 0; i < npe; ++i) disp[m][ids[i]].setZero();
      if (!reset[e]) ++fallback;
      reset[e] = 1;
      changed = true;
    }
  }
  return SpaceTimeDeformation(ls, std::move(disp), fallback);
}

MappedPointData map_point(const DiscreteLevelSet& ls, const SpaceTimeDeformation& def,
                          const AlphaField& alpha, int K, const Vec2& x, double t) {
  MappedPointData d;
  d.tri = K;
  d.x = x;
  d.t = t;
  double v;
  ls.eval_lin(K, x, t, v, d.grad_lin, d.dt_lin);
  const double ng = d.grad_lin.norm();
  if (!(ng > 0.0)) throw DegenerateGradientError("vanishing gradient of the piecewise linear level set");
  d.n_lin = d.grad_lin / ng;
  const Vec3 gs(d.grad_lin[0], d.grad_lin[1], d.dt_lin);
  d.n_slin = gs / gs.norm();

  const DeformationEval ev = def.eval(K, x, t);
  d.image = ev.image;
  d.Ds = ev.D;
  d.dtheta = ev.dtheta;
  d.det = ev.D.determinant();
  if (!(std::abs(d.det) > 1e-14)) throw SingularJacobianError("singular deformation Jacobian");
  d.DsInvT = ev.D.inverse().transpose();
  d.Dst.setZero();
  d.Dst.topLeftCorner<2, 2>() = ev.D;
  d.Dst.block<2, 1>(0, 2) = ev.dtheta;
  d.Dst(2, 2) = 1.0;

  // Chain rule for phi_hat o Theta^{-1}: spatial gradient a, time derivative b.
  const Vec2 a = d.DsInvT * d.grad_lin;
  const double b = d.dt_lin - a.dot(ev.dtheta);
  const double na = a.norm();
  d.n_h = a / na;
  const Vec3 sa(a[0], a[1], b);
  d.n_sh = sa / sa.norm();
  d.Vh = -b / na;
  d.nanson = na / ng;
  d.alpha = alpha.eval(K, d.image, t, d.Vh);
  d.J_alpha = std::abs(d.det) * d.nanson * std::sqrt(1.0 + d.Vh * d.Vh) / d.alpha;
  return d;
}

double eval_Vh(const DiscreteLevelSet& ls, const SpaceTimeDeformation& def, int K, const Vec2& x,
               double t) {
  return map_point(ls, def, AlphaField::simple(), K, x, t).Vh;
}

double eval_alpha(const DiscreteLevelSet& ls, const SpaceTimeDeformation& def,
                  const AlphaField& alpha, int K, const Vec2& x, double t) {
  return map_point(ls, def, alpha, K, x, t).alpha;
}

ReferencePoint invert_map(const SpaceTimeDeformation& def, const CutTopologySlab& topo,
                          const Vec2& y, double t, int hint) {
  const Triangulation& mesh = def.mesh();
  auto allowed = [&](int k) { return topo.is_active(k); };
  int K = mesh.locate(y, hint, allowed);
  if (K < 0) {
    // The deformed region may reach slightly past the undeformed active set.
    const int outer = mesh.locate(y, -1);
    if (outer >= 0)
      for (int e = 0; e < 3 && K < 0; ++e) {
        const int nb = mesh.neighbor(outer, e);
        if (nb >= 0 && topo.is_active(nb)) K = nb;
      }
    if (K < 0) throw InversionError("point outside the deformed active region");
  }
  const double tol = 1e-12 * mesh.h();
  Vec2 x = mesh.to_physical(K, Vec2(1.0 / 3.0, 1.0 / 3.0));
  for (int it = 0; it < 50; ++it) {
    const DeformationEval ev = def.eval(K, x, t);
    const Vec2 r = ev.image - y;
    if (r.norm() <= tol) {
      const auto b = mesh.barycentric(K, x);
      int worst = 0;
      for (int c = 1; c < 3; ++c)
        if (b[c] < b[worst]) worst = c;
      if (b[worst] >= -1e-10) return {K, x};
      const int nb = mesh.neighbor(K, worst);
      if (nb < 0 || !topo.is_active(nb))
        throw InversionError("point outside the deformed active region");
      K = nb;
      continue;
    }
    if (!(std::abs(ev.D.determinant()) > 1e-14))
      throw SingularJacobianError("singular deformation Jacobian in inversion");
    x -= ev.D.inverse() * r;
  }
  throw InversionError("Newton inversion did not converge");
}

}  // namespace sttrace
