#include "sttrace/solver.hpp"

#include <atomic>
#include <limits>
#include <optional>

#include <Eigen/SparseLU>

#include "sttrace/error.hpp"

namespace sttrace {

Eigen::VectorXd solve_slab(const SlabSystem& system, int slab, double* residual) {
  const Eigen::SparseMatrix<double> A = system.A;
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(A);
  lu.factorize(A);
  if (lu.info() != Eigen::Success) throw SolveError(slab, "LU factorization failed: " + lu.lastErrorMessage());
  Eigen::VectorXd x = lu.solve(system.b);
  const double res = (A * x - system.b).norm();
  if (residual) *residual = res;
  if (!(res <= 1e-10 * (system.b.norm() + 1.0)))
    throw SolveError(slab, "residual " + std::to_string(res) + " above tolerance");
  return x;
}

double SlabRecord::eval(int K, const Vec2& x, double t) const {
  return eval_fe(u, *dofmap, topo->local_index(K), x, t).value;
}

TraceFn previous_trace(const SlabRecord& prev, const SpaceTimeDeformation* current,
                       std::atomic<int>* fallbacks) {
  // Evaluation at a reference point of the previous slab (undeformed lookup).
  auto at_reference = [&prev, fallbacks](int K, const Vec2& x) {
    const CutTopologySlab& topo = *prev.topo;
    const Triangulation& mesh = prev.dofmap->mesh();
    int e = topo.local_index(K);
    if (e < 0) {
      const int K2 = mesh.locate(x, K, [&](int k) { return topo.is_active(k); }, 1e-8);
      if (K2 >= 0) {
        e = topo.local_index(K2);
      } else {
        double best = std::numeric_limits<double>::max();
        for (int c = 0; c < topo.size(); ++c) {
          const double d =
              (mesh.to_physical(topo.active()[c], Vec2(1.0 / 3.0, 1.0 / 3.0)) - x).squaredNorm();
          if (d < best) {
            best = d;
            e = c;
          }
        }
        if (fallbacks) ++*fallbacks;
      }
    }
    return eval_fe(prev.u, *prev.dofmap, e, x, topo.t1()).value;
  };
  if (!current || (current->is_identity() && prev.def->is_identity())) return at_reference;

  // Same physical point: y = Theta^n(x, t_{n-1}), then (Theta^{n-1})^{-1}(y).
  return [&prev, current, fallbacks, at_reference](int K, const Vec2& x) {
    const CutTopologySlab& topo = *prev.topo;
    const double t = topo.t1();
    const Vec2 y = current->image(K, x, t);
    try {
      const ReferencePoint rp = invert_map(*prev.def, topo, y, t, topo.is_active(K) ? K : -1);
      return eval_fe(prev.u, *prev.dofmap, topo.local_index(rp.tri), rp.x, t).value;
    } catch (const Error&) {
      if (fallbacks) ++*fallbacks;
      return at_reference(K, x);
    }
  };
}

SpaceTimeSolution march(const MethodParams& params, const AnalyticScene& scene,
                        const Triangulation& mesh, const TimeGrid& grid,
                        const MarchOptions& options) {
  params.validate();
  auto geo_nodes = std::make_shared<const LagrangeNodes>(mesh, params.kgs);
  auto fe_nodes = params.ks == params.kgs ? geo_nodes
                                          : std::make_shared<const LagrangeNodes>(mesh, params.ks);
  SpaceTimeSolution sol;
  sol.num_slabs = grid.num_slabs();
  std::optional<SlabRecord> prev;
  for (int n = 1; n <= grid.num_slabs(); ++n) {
    SlabRecord rec;
    rec.n = n;
    rec.ls = std::make_shared<const DiscreteLevelSet>(
        interpolate_levelset(scene, mesh, geo_nodes, grid, n, params.kgq));
    rec.topo = std::make_shared<const CutTopologySlab>(detect_active(*rec.ls));
    if (rec.topo->empty()) throw EmptyActiveSetError(n);
    rec.def = std::make_shared<const SpaceTimeDeformation>(build_deformation(*rec.ls, *rec.topo));
    rec.alpha = std::make_shared<const AlphaField>(
        params.alpha == AlphaMode::Improved
            ? AlphaField::improved(scene, *rec.ls, rec.topo->active())
            : AlphaField::simple());
    rec.dofmap = std::make_shared<const DofMap>(mesh, *rec.topo, fe_nodes, params.kq);
    const SlabQuadratures quad = build_slab_quadratures(params, *rec.topo, *rec.ls);

    std::atomic<int> fallbacks{0};
    TraceFn trace;
    if (n == 1) {
      sol.initial = std::make_shared<const SpatialTrace>(
          parametric_initial_condition(scene, *rec.def, *rec.topo, fe_nodes));
      trace = [init = sol.initial](int K, const Vec2& x) { return init->eval(K, x); };
    } else {
      trace = previous_trace(*prev, rec.def.get(), &fallbacks);
    }

    SlabContext ctx{&scene, rec.ls.get(), rec.topo.get(), rec.def.get(), rec.alpha.get(),
                    rec.dofmap.get(), &quad};
    const SlabSystem sys = options.parallel ? assemble_slab(params, ctx, trace)
                                            : assemble_slab_serial(params, ctx, trace);
    rec.u = FEFunction{n, solve_slab(sys, n, &rec.residual)};
    rec.transfer_fallbacks = fallbacks.load();
    if (options.observer) options.observer(rec, prev ? &*prev : nullptr, trace);
    if (options.retain_slabs) sol.slabs.push_back(rec);
    prev = std::move(rec);
  }
  return sol;
}

}  // namespace sttrace
