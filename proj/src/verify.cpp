#include "sttrace/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <random>
#include <set>

#include "sttrace/error.hpp"

namespace sttrace {

namespace {

std::string fmt(const char* spec, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, spec, a, b);
  return buf;
}

CheckResult check(std::string name, bool ok, std::string detail) {
  return {std::move(name), ok, std::move(detail)};
}

// Geometry of one slab with k_gs = k_gq = kg.
struct SlabGeometry {
  std::shared_ptr<const LagrangeNodes> nodes;
  std::optional<DiscreteLevelSet> ls;
  CutTopologySlab topo;
  std::optional<SpaceTimeDeformation> def;
};

SlabGeometry make_geometry(const AnalyticScene& scene, const Triangulation& mesh,
                           const TimeGrid& grid, int n, int kg) {
  SlabGeometry g;
  g.nodes = std::make_shared<const LagrangeNodes>(mesh, kg);
  g.ls.emplace(interpolate_levelset(scene, mesh, g.nodes, grid, n, kg));
  g.topo = detect_active(*g.ls);
  g.def.emplace(build_deformation(*g.ls, g.topo));
  return g;
}

Triangulation refined(const Rectangle& domain, double h_init, int level) {
  Triangulation m = build_structured_mesh(domain, h_init);
  for (int i = 0; i < level; ++i) m = refine_uniform(m);
  return m;
}

Vec2 random_in(const Triangulation& mesh, int K, std::mt19937& rng) {
  std::uniform_real_distribution<double> U(0.05, 0.95);
  double a = U(rng), b = U(rng);
  if (a + b > 0.95) {
    a = 0.95 - a;
    b = 0.95 - b;
  }
  return mesh.to_physical(K, Vec2(std::max(a, 0.02), std::max(b, 0.02)));
}

double last_eoc(const std::vector<double>& e) {
  const std::size_t n = e.size();
  return n < 2 ? 0.0 : std::log2(e[n - 2] / e[n - 1]);
}

std::string series(const std::vector<double>& e) {
  std::string s;
  for (double v : e) s += fmt("%.3e ", v);
  return s;
}

}  // namespace

double beta_independence_defect(const AnalyticScene& scene, const MethodParams& params,
                                const Triangulation& mesh, const TimeGrid& grid, int slab) {
  SlabGeometry g = make_geometry(scene, mesh, grid, slab, params.kgs);
  if (g.topo.empty()) throw EmptyActiveSetError(slab);
  const AlphaField alpha = params.alpha == AlphaMode::Improved
                               ? AlphaField::improved(scene, *g.ls, g.topo.active())
                               : AlphaField::simple();
  const auto fe_nodes = params.ks == params.kgs
                            ? g.nodes
                            : std::make_shared<const LagrangeNodes>(mesh, params.ks);
  const DofMap dm(mesh, g.topo, fe_nodes, params.kq);
  const SlabQuadratures quad = build_slab_quadratures(params, g.topo, *g.ls);
  const SlabContext ctx{&scene, &*g.ls, &g.topo, &*g.def, &alpha, &dm, &quad};
  const unsigned terms = kAllTerms & ~(kSource | kTransfer);
  MethodParams p = params;
  p.beta = 0.0;
  const SlabSystem s0 = assemble_slab(p, ctx, {}, terms);
  const double scale = s0.A.coeffs().cwiseAbs().maxCoeff();
  double defect = 0.0;
  for (double beta : {0.5, 1.0}) {
    p.beta = beta;
    const SlabSystem s = assemble_slab(p, ctx, {}, terms);
    const Eigen::SparseMatrix<double, Eigen::RowMajor> d = s.A - s0.A;
    if (d.nonZeros() > 0) defect = std::max(defect, d.coeffs().cwiseAbs().maxCoeff() / scale);
  }
  return defect;
}

double transformation_identity_defect(const AnalyticScene& scene, const Triangulation& mesh,
                                      const TimeGrid& grid, int slab) {
  const SlabGeometry g = make_geometry(scene, mesh, grid, slab, 1);
  const DiscreteLevelSet& ls = *g.ls;
  auto gfun = [](const Vec2& x, double t) { return 1.0 + x[0] * t + x[1] * x[1]; };

  double iterated = 0.0;
  for (const SurfacePoint& p : build_surface_quadrature(g.topo, ls, 20, 4).points)
    iterated += p.weight * gfun(p.x, p.t);

  // g |nu_x| dsigma on bilinear strips between cut segments at neighbouring
  // times; |nu_x| dsigma = dt |d_u X| du dv there.
  const Rule1D gl = gauss_legendre(3);
  auto strips = [&](int M) {
    double sum = 0.0;
    for (int e = 0; e < g.topo.size(); ++e) {
      const int K = g.topo.active()[e];
      const auto corners = mesh.corners(K);
      for (const TimeWindow& w : g.topo.windows(e)) {
        if (!w.cut) continue;
        const double dt = (w.t1 - w.t0) / M;
        std::optional<std::array<Vec2, 2>> prev;
        for (int j = 0; j <= M; ++j) {
          // Window ends are vertex roots where the cut changes edges; stay inside.
          const double t = w.t0 + dt * std::clamp(double(j), 1e-9, M - 1e-9);
          const auto seg = cut_segment(corners, ls.corner_values(K, t), ls.zero_shift());
          if (seg && prev)
            for (std::size_t a = 0; a < gl.nodes.size(); ++a)
              for (std::size_t b = 0; b < gl.nodes.size(); ++b) {
                const double u = gl.nodes[a], v = gl.nodes[b];
                const Vec2 p0 = (1 - v) * (*prev)[0] + v * (*seg)[0];
                const Vec2 p1 = (1 - v) * (*prev)[1] + v * (*seg)[1];
                const Vec2 x = (1 - u) * p0 + u * p1;
                sum += gl.weights[a] * gl.weights[b] * dt * (p1 - p0).norm() *
                       gfun(x, t - dt + v * dt);
              }
          prev = seg;
        }
      }
    }
    return sum;
  };
  const double I1 = strips(200), I2 = strips(400);
  const double surface = (4.0 * I2 - I1) / 3.0;
  return std::abs(iterated - surface) / std::abs(surface);
}

std::vector<double> geometry_errors(const AnalyticScene& scene, int kg, double h_init,
                                    double dt_init, int levels) {
  std::vector<double> out;
  const double fractions[] = {0.1, 0.3, 0.45, 0.7, 0.9};
  for (int l = 0; l < levels; ++l) {
    const Triangulation mesh = refined(scene.domain(), h_init, l);
    const TimeGrid grid = build_time_grid(scene.T(), dt_init, l);
    const SlabGeometry g = make_geometry(scene, mesh, grid, 1, kg);
    double err = 0.0;
    for (double f : fractions) {
      const double t = g.ls->t0() + f * g.ls->dt();
      for (int K : g.topo.active()) {
        const auto seg = cut_segment(mesh.corners(K), g.ls->corner_values(K, t), g.ls->zero_shift());
        if (!seg) continue;
        for (int i = 0; i <= 4; ++i) {
          const Vec2 x = (*seg)[0] + (i / 4.0) * ((*seg)[1] - (*seg)[0]);
          err = std::max(err, std::abs(scene.phi(g.def->image(K, x, t), t)));
        }
      }
    }
    out.push_back(err);
  }
  return out;
}

std::vector<double> stabilization_consistency(const AnalyticScene& scene, int k, double h_init,
                                              double dt_init, int levels) {
  if (!scene.has_exact_solution() || !scene.has_closest_point())
    throw UnsupportedSceneError("stabilization check needs u and a closest-point map");
  std::vector<double> out;
  for (int l = 0; l < levels; ++l) {
    const Triangulation mesh = refined(scene.domain(), h_init, l);
    const TimeGrid grid = build_time_grid(scene.T(), dt_init, l);
    const SlabGeometry g = make_geometry(scene, mesh, grid, 1, k);
    const PrismQuadrature q = build_prism_quadrature(g.topo, mesh, k + 2, k + 2);
    double s = 0.0;
    for (const PrismPoint& p : q.points) {
      const DeformationEval ev = g.def->eval(p.tri, p.x, p.t);
      const Vec2 a = ev.D.inverse().transpose() * g.ls->grad_lin(p.tri, p.t);
      const ClosestPoint cp = scene.closest_point(ev.image, p.t);
      const Vec2 gu = cp.jacobian.transpose() * scene.u_jet(cp.point, p.t).g.head<2>();
      const double dn = a.normalized().dot(gu);
      s += mesh.h() * p.weight * std::abs(ev.D.determinant()) * dn * dn;
    }
    out.push_back(std::sqrt(s));
  }
  return out;
}

std::vector<double> quadrature_L_errors(const AnalyticScene& scene, const Triangulation& mesh,
                                        const TimeGrid& grid, int slab, const std::vector<int>& Ls) {
  const SlabGeometry g = make_geometry(scene, mesh, grid, slab, 1);
  auto integral = [&](int L) {
    double s = 0.0;
    for (const SurfacePoint& p : build_surface_quadrature(g.topo, *g.ls, L, 6).points)
      s += p.weight * std::cos(2.0 * p.x[0] + p.t) * (1.0 + p.x[1] * p.x[1]);
    return s;
  };
  const double ref = integral(40);
  std::vector<double> out;
  for (int L : Ls) out.push_back(std::abs(integral(L) - ref) / std::abs(ref));
  return out;
}

double constant_solution_defect(double c, int k, int levels_below) {
  AnalyticScene scene = make_stationary_circle(0.5);
  scene.clear_exact_solution();
  scene.set_initial_datum([c](const Vec2&) { return c; });
  MethodParams p;
  p.ks = p.kq = p.kgs = p.kgq = k;
  const Triangulation mesh = refined(scene.domain(), 0.25, levels_below);
  const TimeGrid grid = build_time_grid(scene.T(), 0.25, levels_below);
  MarchOptions opt;
  opt.retain_slabs = true;
  const SpaceTimeSolution sol = march(p, scene, mesh, grid, opt);
  double d = 0.0;
  for (const SlabRecord& r : sol.slabs)
    d = std::max(d, (r.u.coeffs.array() - c).abs().maxCoeff());
  return d;
}

// ---------------------------------------------------------------------------

namespace {

CheckResult check_partition_of_unity() {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double worst = 0.0;
  for (int ks = 1; ks <= 3; ++ks)
    for (int kq = 0; kq <= 3; ++kq) {
      const TensorBasis b(ks, kq);
      std::vector<double> v(b.size());
      std::vector<Vec3> g(b.size());
      for (int trial = 0; trial < 20; ++trial) {
        double x = U(rng), y = U(rng);
        if (x + y > 1.0) {
          x = 1.0 - x;
          y = 1.0 - y;
        }
        b.eval(Vec2(x, y), U(rng), v, g);
        double sv = -1.0;
        Vec3 sg = Vec3::Zero();
        for (int i = 0; i < b.size(); ++i) {
          sv += v[i];
          sg += g[i];
        }
        worst = std::max({worst, std::abs(sv), sg.cwiseAbs().maxCoeff()});
      }
    }
  return check("partition of unity", worst <= 1e-11, fmt("max defect %.2e", worst));
}

CheckResult check_polynomial_reproduction() {
  const AnalyticScene scene = make_moving_circle();
  const Triangulation mesh = build_structured_mesh(scene.domain(), 0.25);
  const TimeGrid grid(1.0, 4);
  std::mt19937 rng(11);
  double worst = 0.0;
  for (int k = 1; k <= 3; ++k) {
    const SlabGeometry g = make_geometry(scene, mesh, grid, 2, k);
    const DofMap dm(mesh, g.topo, g.nodes, k);
    auto poly = [k](const Vec2& x, double t) {
      double s = 1.0 + x[0] - 2.0 * x[1];
      if (k >= 2) s += x[0] * x[1] + x[0] * x[0] - 0.5 * x[1] * x[1];
      if (k >= 3) s += x[0] * x[0] * x[1] - x[1] * x[1] * x[1];
      return s * (1.0 + t + (k >= 2 ? t * t : 0.0) + (k >= 3 ? -t * t * t : 0.0));
    };
    const FEFunction f = interpolate_fe(dm, poly);
    std::uniform_real_distribution<double> T(dm.t0(), dm.t1());
    for (int e = 0; e < dm.num_elements(); ++e) {
      const Vec2 x = random_in(mesh, dm.element_triangle(e), rng);
      const double t = T(rng);
      worst = std::max(worst, std::abs(eval_fe(f, dm, e, x, t).value - poly(x, t)));
    }
  }
  return check("polynomial reproduction", worst <= 1e-10, fmt("max error %.2e", worst));
}

CheckResult check_fe_gradient_fd() {
  const AnalyticScene scene = make_moving_circle();
  const Triangulation mesh = build_structured_mesh(scene.domain(), 0.25);
  const TimeGrid grid(1.0, 4);
  const SlabGeometry g = make_geometry(scene, mesh, grid, 2, 2);
  const DofMap dm(mesh, g.topo, g.nodes, 2);
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> U(-1.0, 1.0), T(dm.t0(), dm.t1());
  FEFunction f{2, Eigen::VectorXd(dm.num_dofs())};
  for (int i = 0; i < dm.num_dofs(); ++i) f.coeffs[i] = U(rng);
  const double eps = 1e-5;
  double worst = 0.0, worst_def = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int e = static_cast<int>(rng() % dm.num_elements());
    const int K = dm.element_triangle(e);
    const Vec2 x = random_in(mesh, K, rng);
    const double t = T(rng);
    // Undeformed derivatives.
    const FEValue v = eval_fe(f, dm, e, x, t);
    const Vec2 ex(eps, 0.0), ey(0.0, eps);
    const Vec3 fd((eval_fe(f, dm, e, x + ex, t).value - eval_fe(f, dm, e, x - ex, t).value) / (2 * eps),
                  (eval_fe(f, dm, e, x + ey, t).value - eval_fe(f, dm, e, x - ey, t).value) / (2 * eps),
                  (eval_fe(f, dm, e, x, t + eps).value - eval_fe(f, dm, e, x, t - eps).value) / (2 * eps));
    const Vec3 an(v.grad[0], v.grad[1], v.dt);
    worst = std::max(worst, (fd - an).cwiseAbs().maxCoeff() / std::max(1.0, an.cwiseAbs().maxCoeff()));

    // Deformed derivatives: perturb the image point and pull back.
    const FEValue vd = eval_fe(f, dm, e, x, t, &*g.def);
    const Vec2 y = g.def->image(K, x, t);
    auto value_at = [&](const Vec2& yy, double tt) {
      const ReferencePoint r = invert_map(*g.def, g.topo, yy, tt, K);
      return eval_fe(f, dm, g.topo.local_index(r.tri), r.x, tt).value;
    };
    const Vec3 fdd((value_at(y + ex, t) - value_at(y - ex, t)) / (2 * eps),
                   (value_at(y + ey, t) - value_at(y - ey, t)) / (2 * eps),
                   (value_at(y, t + eps) - value_at(y, t - eps)) / (2 * eps));
    const Vec3 and_(vd.grad[0], vd.grad[1], vd.dt);
    worst_def = std::max(worst_def,
                         (fdd - and_).cwiseAbs().maxCoeff() / std::max(1.0, and_.cwiseAbs().maxCoeff()));
  }
  const bool ok = worst <= 1e-7 && worst_def <= 1e-7;
  return check("gradient vs finite differences", ok,
               fmt("undeformed %.2e, deformed %.2e", worst, worst_def));
}

CheckResult check_velocity_fd() {
  const AnalyticScene scene = make_moving_circle();
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> U(-0.9, 0.9), T(0.0, 1.0);
  const double eps = 1e-6;
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const Vec2 x(U(rng), U(rng));
    const double t = T(rng);
    const Mat2 gw = scene.grad_w(x, t);
    const PhiDerivs ph = scene.phi_derivs(x, t);
    for (int j = 0; j < 2; ++j) {
      Vec2 d = Vec2::Zero();
      d[j] = eps;
      const Vec2 fd = (scene.w(x + d, t) - scene.w(x - d, t)) / (2 * eps);
      worst = std::max(worst, (fd - gw.col(j)).cwiseAbs().maxCoeff() / std::max(1.0, gw.cwiseAbs().maxCoeff()));
      const double fp = (scene.phi(x + d, t) - scene.phi(x - d, t)) / (2 * eps);
      worst = std::max(worst, std::abs(fp - ph.grad[j]));
    }
    const double ft = (scene.phi(x, t + eps) - scene.phi(x, t - eps)) / (2 * eps);
    worst = std::max(worst, std::abs(ft - ph.dt));
  }
  return check("scene derivatives vs finite differences", worst <= 1e-7, fmt("max defect %.2e", worst));
}

}  // namespace

std::vector<CheckResult> invariant_suite() {
  std::vector<CheckResult> r;
  auto guarded = [&r](const std::string& name, auto fn) {
    try {
      r.push_back(fn());
    } catch (const std::exception& e) {
      r.push_back(check(name, false, std::string("exception: ") + e.what()));
    }
  };

  guarded("transformation identity", [] {
    const AnalyticScene scene = make_moving_circle();
    const double d = transformation_identity_defect(
        scene, refined(scene.domain(), 0.25, 1), build_time_grid(1.0, 0.25, 1), 2);
    return check("transformation identity (k=1)", d <= 1e-6, fmt("relative gap %.2e", d));
  });
  guarded("beta independence", [] {
    const AnalyticScene scene = make_stationary_circle(0.5);
    const Triangulation mesh = build_structured_mesh(scene.domain(), 0.25);
    const TimeGrid grid = build_time_grid(1.0, 0.25, 0);
    double d = 0.0;
    for (int k = 1; k <= 2; ++k) {
      MethodParams p;
      p.ks = p.kq = p.kgs = p.kgq = k;
      d = std::max(d, beta_independence_defect(scene, p, mesh, grid));
    }
    return check("beta independence (w = 0)", d <= 1e-12, fmt("max relative defect %.2e", d));
  });
  guarded("geometry order", [] {
    const auto e = geometry_errors(make_moving_circle(), 2, 0.25, 0.25, 4);
    const double eoc = last_eoc(e);
    return check("geometry order (k_g=2)", eoc >= 2.7, fmt("EOC %.2f; ", eoc) + series(e));
  });
  guarded("stabilization consistency", [] {
    const auto e = stabilization_consistency(make_moving_circle(), 1, 0.25, 0.25, 4);
    bool decays = true;
    for (std::size_t i = 1; i < e.size(); ++i) decays = decays && e[i] < e[i - 1];
    const double eoc = last_eoc(e);
    return check("stabilization consistency decay", decays && eoc >= 1.5,
                 fmt("EOC %.2f; ", eoc) + series(e));
  });
  guarded("constant solution", [] {
    const double d = std::max(constant_solution_defect(2.5, 1), constant_solution_defect(2.5, 2));
    return check("constant solution exactness", d <= 1e-10, fmt("max coefficient defect %.2e", d));
  });
  guarded("quadrature L-convergence", [] {
    const AnalyticScene scene = make_moving_circle();
    const std::vector<int> Ls{1, 2, 3, 4, 6, 8};
    const auto e = quadrature_L_errors(scene, refined(scene.domain(), 0.25, 1),
                                       build_time_grid(1.0, 0.25, 1), 2, Ls);
    bool mono = true;
    for (std::size_t i = 1; i < e.size(); ++i) mono = mono && e[i] <= std::max(e[i - 1], 1e-13);
    return check("quadrature L-convergence", mono && e[3] <= 1e-6, series(e));
  });
  r.push_back(check_partition_of_unity());
  guarded("polynomial reproduction", check_polynomial_reproduction);
  guarded("gradient vs finite differences", check_fe_gradient_fd);
  guarded("scene derivatives", check_velocity_fd);
  return r;
}

std::vector<CheckResult> oracle_suite() {
  std::vector<CheckResult> r;
  auto guarded = [&r](const std::string& name, auto fn) {
    try {
      r.push_back(fn());
    } catch (const std::exception& e) {
      r.push_back(check(name, false, std::string("exception: ") + e.what()));
    }
  };

  guarded("small solves", [] {
    SlabSystem s1;
    s1.A.resize(1, 1);
    s1.A.insert(0, 0) = 2.0;
    s1.b = Eigen::VectorXd::Constant(1, 4.0);
    const double c = solve_slab(s1)[0];
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    Eigen::MatrixXd B(50, 50);
    for (int i = 0; i < 50; ++i)
      for (int j = 0; j < 50; ++j) B(i, j) = U(rng);
    const Eigen::MatrixXd M = B * B.transpose() + 50.0 * Eigen::MatrixXd::Identity(50, 50);
    SlabSystem s2;
    s2.A = M.sparseView();
    s2.b = Eigen::VectorXd::NullaryExpr(50, [&] { return U(rng); });
    double res = 0.0;
    solve_slab(s2, 0, &res);
    return check("linear solve (1-dof, SPD 50x50)", std::abs(c - 2.0) <= 1e-14 && res <= 1e-10,
                 fmt("c = %.15g, residual %.2e", c, res));
  });
  guarded("level-0 march", [] {
    const AnalyticScene scene = make_moving_circle();
    const Triangulation mesh = build_structured_mesh(scene.domain(), 0.125);
    const TimeGrid grid = build_time_grid(1.0, 0.125, 0);
    int slabs = 0;
    double worst = 0.0;
    MarchOptions opt;
    opt.observer = [&](const SlabRecord& cur, const SlabRecord*, const TraceFn&) {
      ++slabs;
      worst = std::max(worst, cur.residual);
    };
    march(MethodParams{}, scene, mesh, grid, opt);
    return check("moving circle level 0: 8 slabs", slabs == 8 && worst <= 1e-10,
                 fmt("slabs %.0f, max residual %.2e", slabs, worst));
  });
  guarded("polyline length", [] {
    const AnalyticScene scene = make_stationary_circle(0.5);
    const Triangulation mesh = build_structured_mesh(scene.domain(), 0.125);
    const TimeGrid grid(1.0, 4);
    const SlabGeometry g = make_geometry(scene, mesh, grid, 1, 1);
    double len = 0.0;
    for (int K : g.topo.active()) {
      const auto seg = cut_segment(mesh.corners(K), g.ls->corner_values(K, 0.0), g.ls->zero_shift());
      if (seg) len += ((*seg)[1] - (*seg)[0]).norm();
    }
    const double total = build_surface_quadrature(g.topo, *g.ls, 4, 2).total_weight();
    const double rel = std::abs(total - len * grid.dt()) / (len * grid.dt());
    return check("surface rule = polyline length x dt", rel <= 1e-12, fmt("relative error %.2e", rel));
  });
  guarded("dense-time oracle", [] {
    const AnalyticScene scene = make_moving_circle();
    const Triangulation mesh = build_structured_mesh(scene.domain(), 0.125);
    const TimeGrid grid(1.0, 8);
    const SlabGeometry g = make_geometry(scene, mesh, grid, 3, 1);
    auto length = [&](double t) {
      double s = 0.0;
      for (int K : g.topo.active()) {
        const auto seg = cut_segment(mesh.corners(K), g.ls->corner_values(K, t), g.ls->zero_shift());
        if (seg) s += ((*seg)[1] - (*seg)[0]).norm();
      }
      return s;
    };
    const int M = 1000;
    double trap = 0.0;
    for (int j = 0; j <= M; ++j)
      trap += (j == 0 || j == M ? 0.5 : 1.0) * length(g.ls->t0() + g.ls->dt() * j / M);
    trap *= g.ls->dt() / M;
    const double q = build_surface_quadrature(g.topo, *g.ls, 4, 2).total_weight();
    const double rel = std::abs(q - trap) / trap;
    return check("surface rule vs dense-time trapezoid (L=4)", rel <= 1e-6, fmt("relative gap %.2e", rel));
  });
  guarded("prism integral", [] {
    const Triangulation mesh = build_structured_mesh(Rectangle{0, 1, 0, 1}, 1.0);
    CutTopologySlab topo(1, {0.0, 1.0}, mesh.num_triangles());
    for (int K = 0; K < mesh.num_triangles(); ++K) topo.add(K, {0.0, 1.0}, {TimeWindow{0.0, 1.0, true}});
    double s = 0.0;
    for (const PrismPoint& p : build_prism_quadrature(topo, mesh, 3, 2).points)
      s += p.weight * p.x[0] * p.x[0] * p.x[1] * p.t;
    return check("prism rule on x^2 y t", std::abs(s - 1.0 / 12.0) <= 1e-12, fmt("value %.15g", s));
  });
  guarded("cut segment tie-break", [] {
    const std::array<Vec2, 3> c{Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)};
    const double eps = 1e-12;
    const auto a = cut_segment(c, {1.0, -1.0, 0.0}, eps);
    const auto b = cut_segment(c, {1.0, -1.0, eps}, 0.0);
    const bool ok = a && b && ((*a)[0] - (*b)[0]).norm() <= 1e-15 && ((*a)[1] - (*b)[1]).norm() <= 1e-15 &&
                    ((*a)[1] - Vec2(0.5, 0.0)).norm() <= 1e-15 &&
                    ((*a)[0] - c[2]).norm() <= 2.0 * eps;
    return check("cut segment zero tie-break", ok, "values (1,-1,0)");
  });
  guarded("active set", [] {
    const AnalyticScene scene = make_stationary_circle(0.5);
    const Triangulation mesh = build_structured_mesh(scene.domain(), 0.125);
    const TimeGrid grid(1.0, 4);
    const SlabGeometry g = make_geometry(scene, mesh, grid, 2, 1);
    int brute = 0;
    for (int K = 0; K < mesh.num_triangles(); ++K) {
      bool neg = false, pos = false;
      for (int j = 0; j < 100; ++j) {
        const double t = g.ls->t0() + g.ls->dt() * (j + 0.5) / 100.0;
        for (double v : g.ls->corner_values(K, t)) (v < 0.0 ? neg : pos) = true;
      }
      brute += neg && pos;
    }
    return check("active set vs brute-force sampling", brute == g.topo.size(),
                 fmt("detected %.0f, sampled %.0f", g.topo.size(), brute));
  });
  guarded("dof recount", [] {
    const AnalyticScene scene = make_stationary_circle(0.5);
    const Triangulation mesh = build_structured_mesh(scene.domain(), 0.25);
    const TimeGrid grid(1.0, 4);
    const SlabGeometry g = make_geometry(scene, mesh, grid, 1, 2);
    const DofMap dm(mesh, g.topo, g.nodes, 1);
    std::set<int> ids;
    for (int K : g.topo.active())
      for (int id : g.nodes->element_nodes(K)) ids.insert(id);
    return check("spatial dofs = union of element nodes",
                 dm.num_spatial() == static_cast<int>(ids.size()) && dm.num_dofs() == 2 * dm.num_spatial(),
                 fmt("%.0f vs %.0f", dm.num_spatial(), ids.size()));
  });
  guarded("normal velocity", [] {
    const AnalyticScene scene = make_moving_circle();
    const Vec2 x(0.95, 0.0);
    const double Vn = scene.normal_velocity(x, 0.0);
    std::vector<double> e;
    for (int l = 0; l < 4; ++l) {
      const Triangulation mesh = refined(scene.domain(), 0.125, l);
      const TimeGrid grid = build_time_grid(1.0, 0.125, l);
      const SlabGeometry g = make_geometry(scene, mesh, grid, 1, 1);
      const int K = mesh.locate(x, -1);
      e.push_back(std::abs(eval_Vh(*g.ls, *g.def, K, x, 0.0) + 0.1125));
    }
    const double eoc = last_eoc(e);
    return check("normal velocity at (0.95, 0)", std::abs(Vn + 0.1125) <= 1e-12 && eoc >= 0.8,
                 fmt("w.n = %.6f, V_h error EOC %.2f; ", Vn, eoc) + series(e));
  });
  guarded("manufactured source", [] {
    AnalyticScene scene = make_stationary_circle(1.0);
    scene.set_exact_solution([](double x, double, double) { return x; },
                             [](const Jet& x, const Jet&, const Jet&) { return x; });
    double worst = 0.0;
    for (int i = 0; i < 16; ++i) {
      const double th = 0.4 + i * 0.37;
      const Vec2 x(std::cos(th), std::sin(th));
      worst = std::max(worst, std::abs(manufactured_source(scene, x, 0.3, 1.0) - x[0]));
    }
    return check("source for u = x on the unit circle", worst <= 1e-12, fmt("max defect %.2e", worst));
  });
  guarded("deformation round trip", [] {
    const AnalyticScene scene = make_moving_circle();
    const Triangulation mesh = build_structured_mesh(scene.domain(), 0.125);
    const TimeGrid grid(1.0, 8);
    const SlabGeometry g = make_geometry(scene, mesh, grid, 3, 2);
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> T(g.ls->t0(), g.ls->t1());
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const int K = g.topo.active()[rng() % g.topo.size()];
      const Vec2 x = random_in(mesh, K, rng);
      const double t = T(rng);
      const ReferencePoint rp = invert_map(*g.def, g.topo, g.def->image(K, x, t), t, K);
      worst = std::max(worst, (mesh.to_physical(rp.tri, mesh.to_reference(rp.tri, rp.x)) - x).norm());
    }
    return check("deformation round trip (k_g=2)", worst <= 1e-11, fmt("max error %.2e", worst));
  });
  guarded("level-set band error", [] {
    const AnalyticScene scene = make_moving_circle();
    std::vector<double> e;
    for (int l = 0; l < 3; ++l) {
      const Triangulation mesh = refined(scene.domain(), 0.25, l);
      const TimeGrid grid = build_time_grid(1.0, 0.25, l);
      const SlabGeometry g = make_geometry(scene, mesh, grid, 1, 1);
      double err = 0.0;
      for (int K : g.topo.active())
        for (int i = 0; i <= 4; ++i)
          for (int j = 0; i + j <= 4; ++j)
            for (int m = 0; m <= 4; ++m) {
              const Vec2 x = mesh.to_physical(K, Vec2(i / 4.0, j / 4.0));
              const double t = g.ls->t0() + g.ls->dt() * m / 4.0;
              err = std::max(err, std::abs(g.ls->eval(K, x, t) - scene.phi(x, t)));
            }
      e.push_back(err);
    }
    const double eoc = last_eoc(e);
    return check("level-set interpolation order (k_g=1)", eoc >= 1.7, fmt("EOC %.2f; ", eoc) + series(e));
  });
  guarded("eoc", [] {
    const auto e = compute_eoc({0.1, 0.05, 0.0125, 0.0125});
    const bool ok = std::abs(*e[0] - 1.0) <= 1e-12 && std::abs(*e[1] - 2.0) <= 1e-12 &&
                    std::abs(*e[2]) <= 1e-12 && !eoc(0.1, 0.0);
    return check("eoc examples", ok, "(0.1,0.05)->1, (0.05,0.0125)->2, equal->0");
  });
  return r;
}

std::vector<CheckResult> run_suite(const std::string& suite) {
  if (suite == "invariants") return invariant_suite();
  if (suite == "oracles") return oracle_suite();
  throw ConfigError("unknown suite '" + suite + "' (expected invariants or oracles)");
}

}  // namespace sttrace
