#include "sttrace/postproc.hpp"

#include <cmath>

#include "sttrace/error.hpp"

namespace sttrace {

std::optional<double> ErrorReport::energy() const {
  if (!has_exact || extension != ExtensionMode::ClosestPoint) return std::nullopt;
  return std::sqrt(end_sq + jump_sq + l2_sq + grad_sq + xi_sq);
}

std::optional<double> ErrorReport::surface_energy() const {
  if (!has_exact) return std::nullopt;
  return std::sqrt(end_sq + jump_sq + l2_sq + grad_sq);
}

std::optional<double> ErrorReport::linf_l2() const {
  if (!has_exact) return std::nullopt;
  return std::sqrt(end_sq);
}

ErrorAccumulator::ErrorAccumulator(const AnalyticScene& scene, const MethodParams& params,
                                   std::optional<ExtensionMode> extension)
    : scene_(&scene), params_(params) {
  report_.has_exact = scene.has_exact_solution();
  report_.extension = extension.value_or(scene.has_closest_point() ? ExtensionMode::ClosestPoint
                                                                   : ExtensionMode::Analytic);
  if (report_.extension == ExtensionMode::ClosestPoint && !scene.has_closest_point())
    throw UnsupportedSceneError("scene '" + scene.name() + "' has no closest-point map");
}

ErrorAccumulator::Extended ErrorAccumulator::exact(const Vec2& y, double t) const {
  if (report_.extension == ExtensionMode::ClosestPoint) {
    const ClosestPoint cp = scene_->closest_point(y, t);
    const Jet u = scene_->u_jet(cp.point, t);
    return {u.v, cp.jacobian.transpose() * u.g.head<2>()};
  }
  const Jet u = scene_->u_jet(y, t);
  return {u.v, u.g.head<2>()};
}

SlabObserver ErrorAccumulator::observer() {
  return [this](const SlabRecord& cur, const SlabRecord* prev, const TraceFn& trace) {
    add_slab(cur, prev, trace);
  };
}

void ErrorAccumulator::add_slab(const SlabRecord& cur, const SlabRecord* prev,
                                const TraceFn& prev_trace) {
  const DiscreteLevelSet& ls = *cur.ls;
  const CutTopologySlab& topo = *cur.topo;
  const SpaceTimeDeformation& def = *cur.def;
  const DofMap& dm = *cur.dofmap;
  const AlphaField simple = AlphaField::simple();
  const SlabQuadratures q = build_slab_quadratures(params_, topo, ls, 1);
  const bool exact_ok = report_.has_exact;
  const double t0 = topo.t0(), t1 = topo.t1();

  // Slab start: initial mass and jump of the error.
  double jump = 0.0, mass0 = 0.0, surf0 = 0.0;
  for (const SurfacePoint& p : q.bottom.points) {
    const MappedPointData md = map_point(ls, def, simple, p.tri, p.x, t0);
    const double meas = p.weight * std::abs(md.det) * md.nanson;
    const double uprev = prev_trace(p.tri, p.x);
    mass0 += meas * uprev;
    surf0 += meas;
    if (!exact_ok) continue;
    const double uplus = eval_fe(cur.u, dm, p.elem, p.x, t0).value;
    // Image of the reference point under the previous slab's deformation.
    Vec2 yprev = md.image;
    if (prev) {
      int K = prev->topo->is_active(p.tri) ? p.tri : -1;
      if (K < 0)
        K = prev->dofmap->mesh().locate(p.x, p.tri,
                                        [&](int k) { return prev->topo->is_active(k); }, 1e-8);
      if (K >= 0) yprev = prev->def->image(K, p.x, t0);
    }
    const double e_plus = exact(md.image, t0).value - uplus;
    const double e_minus = exact(yprev, t0).value - uprev;
    jump += meas * (e_plus - e_minus) * (e_plus - e_minus);
  }
  if (cur.n == 1) {
    report_.i_mass.push_back(mass0);
    report_.i_surf.push_back(surf0);
  }

  // Slab end: mass, area and the L2 trace error.
  double mass = 0.0, surf = 0.0, end = 0.0;
  for (const SurfacePoint& p : q.top.points) {
    const MappedPointData md = map_point(ls, def, simple, p.tri, p.x, t1);
    const double meas = p.weight * std::abs(md.det) * md.nanson;
    const double u = eval_fe(cur.u, dm, p.elem, p.x, t1).value;
    mass += meas * u;
    surf += meas;
    if (exact_ok) {
      const double e = exact(md.image, t1).value - u;
      end += meas * e * e;
    }
  }
  report_.i_mass.push_back(mass);
  report_.i_surf.push_back(surf);
  report_.e_mass = std::max(report_.e_mass, std::abs(mass - report_.i_mass.front()));
  report_.num_slabs = cur.n;
  if (!exact_ok) return;

  report_.end_sq = std::max(report_.end_sq, end);
  report_.jump_sq += jump;
  report_.jumps.push_back(jump);

  for (const SurfacePoint& p : q.surface.points) {
    const MappedPointData md = map_point(ls, def, simple, p.tri, p.x, p.t);
    const double meas = p.weight * std::abs(md.det) * md.nanson * std::sqrt(1.0 + md.Vh * md.Vh);
    const FEValue uh = eval_fe(cur.u, dm, p.elem, p.x, p.t, &def);
    const Extended ue = exact(md.image, p.t);
    const double e = ue.value - uh.value;
    const Vec2 ge = ue.grad - uh.grad;
    const Vec2 tg = ge - md.n_h * md.n_h.dot(ge);
    report_.l2_sq += meas * e * e;
    report_.grad_sq += meas * tg.squaredNorm();
  }

  if (report_.extension == ExtensionMode::ClosestPoint) {
    const double xi = params_.xi(ls.mesh().h());
    for (const PrismPoint& p : q.prism.points) {
      const DeformationEval ev = def.eval(p.tri, p.x, p.t);
      const Vec2 a = ev.D.inverse().transpose() * ls.grad_lin(p.tri, p.t);
      const double na = a.norm();
      if (!(na > 1e-14 * std::max(1.0, ls.lin_scale()))) continue;
      const FEValue uh = eval_fe(cur.u, dm, p.elem, p.x, p.t, &def);
      const double dn = (a / na).dot(exact(ev.image, p.t).grad - uh.grad);
      report_.xi_sq += xi * p.weight * std::abs(ev.D.determinant()) * dn * dn;
    }
  }
}

namespace {

void replay(const SpaceTimeSolution& sol, ErrorAccumulator& acc) {
  if (static_cast<int>(sol.slabs.size()) != sol.num_slabs)
    throw ConfigError("post-processing needs a solution with all slabs retained");
  for (std::size_t i = 0; i < sol.slabs.size(); ++i) {
    const SlabRecord* prev = i > 0 ? &sol.slabs[i - 1] : nullptr;
    TraceFn trace = prev ? previous_trace(*prev, sol.slabs[i].def.get())
                         : TraceFn([init = sol.initial](int K, const Vec2& x) { return init->eval(K, x); });
    acc.add_slab(sol.slabs[i], prev, trace);
  }
}

}  // namespace

ErrorReport evaluate_errors(const SpaceTimeSolution& sol, const AnalyticScene& scene,
                            const MethodParams& params, std::optional<ExtensionMode> extension) {
  ErrorAccumulator acc(scene, params, extension);
  replay(sol, acc);
  return acc.report();
}

std::optional<double> energy_error(const SpaceTimeSolution& sol, const AnalyticScene& scene,
                                   const MethodParams& params) {
  const ErrorReport r = evaluate_errors(sol, scene, params);
  if (r.energy()) return r.energy();
  return r.surface_energy();
}

std::optional<double> linf_l2_error(const SpaceTimeSolution& sol, const AnalyticScene& scene,
                                    const MethodParams& params) {
  return evaluate_errors(sol, scene, params).linf_l2();
}

MassSeries mass_area_series(const SpaceTimeSolution& sol, const AnalyticScene& scene,
                            const MethodParams& params) {
  const ErrorReport r = evaluate_errors(sol, scene, params, ExtensionMode::Analytic);
  return {r.i_mass, r.i_surf, r.e_mass};
}

std::optional<double> eoc(std::optional<double> coarse, std::optional<double> fine) {
  if (!coarse || !fine || !(*coarse > 0.0) || !(*fine > 0.0)) return std::nullopt;
  return std::log2(*coarse / *fine);
}

std::vector<std::optional<double>> compute_eoc(const std::vector<std::optional<double>>& errors) {
  std::vector<std::optional<double>> r;
  for (std::size_t l = 0; l + 1 < errors.size(); ++l) r.push_back(eoc(errors[l], errors[l + 1]));
  return r;
}

}  // namespace sttrace
