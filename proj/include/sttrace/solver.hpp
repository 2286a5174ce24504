#pragma once

#include <atomic>
#include <functional>
#include <memory>
#include <vector>

#include "sttrace/assembly.hpp"

namespace sttrace {

/// Sparse LU solve; throws SolveError (with the slab index) on factorization
/// failure or when ||A c - b|| > 1e-10 (||b|| + 1).
Eigen::VectorXd solve_slab(const SlabSystem& system, int slab = 0, double* residual = nullptr);

/// Everything produced for one slab.
struct SlabRecord {
  int n = 0;
  std::shared_ptr<const DiscreteLevelSet> ls;
  std::shared_ptr<const CutTopologySlab> topo;
  std::shared_ptr<const SpaceTimeDeformation> def;
  std::shared_ptr<const AlphaField> alpha;
  std::shared_ptr<const DofMap> dofmap;
  FEFunction u;
  double residual = 0.0;
  int transfer_fallbacks = 0;  // transfer points evaluated by nearest element

  /// u_h at reference point x of triangle K (an active element), time t.
  double eval(int K, const Vec2& x, double t) const;
};

/// Trace u_-^{n-1} used by slab n's transfer term, at reference point x of
/// triangle K of slab n. With `current` (slab n's deformation) the previous
/// solution is taken at the physical point Theta^n(x, t_{n-1}) through the
/// inverse of Theta^{n-1}; without it, at the same reference point. Points
/// that cannot be inverted or lie outside the previous active set use the
/// nearest active element and are counted in `fallbacks` when given.
TraceFn previous_trace(const SlabRecord& prev, const SpaceTimeDeformation* current = nullptr,
                       std::atomic<int>* fallbacks = nullptr);

struct SpaceTimeSolution {
  int num_slabs = 0;
  std::shared_ptr<const SpatialTrace> initial;
  std::vector<SlabRecord> slabs;  // filled only when retained
};

/// Called after every slab with the slab, its predecessor (null for n = 1)
/// and the previous-slab trace used by the transfer term.
using SlabObserver =
    std::function<void(const SlabRecord& cur, const SlabRecord* prev, const TraceFn& prev_trace)>;

struct MarchOptions {
  bool parallel = true;
  bool retain_slabs = false;
  SlabObserver observer;
};

/// Solves slab after slab. Throws EmptyActiveSetError if the surface leaves
/// the mesh; other failures propagate.
SpaceTimeSolution march(const MethodParams& params, const AnalyticScene& scene,
                        const Triangulation& mesh, const TimeGrid& grid,
                        const MarchOptions& options = {});

}  // namespace sttrace
