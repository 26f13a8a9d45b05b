#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "ebamr/level.hpp"
#include "ebamr/rerd.hpp"
#include "ebamr/sync.hpp"

namespace ebamr {

inline constexpr int kRefRatio = 2;
inline constexpr int kFieldGhost = 10;

struct AmrOptions {
  Integrator integrator = Integrator::godunov;
  Redistribution redist = Redistribution::wsrd_normal;
  bool refluxing = true;
  bool rerd = true;
  double cfl = 0.5;
  DomainBc bc{};
  Gas gas{};
  WsrdOptions wsrd_opt{};
  bool density_weighted = false;
  int nesting_margin = 4;  // coarse cells between a fine box and its parent's coarse/fine boundary
};

/// One refinement level. Geometry and redistribution operators cover the whole level domain;
/// the solution lives on `valid` plus kFieldGhost ghost cells.
struct Level {
  LevelGeometry geom;
  WsrdOperator wsrd;
  FrdNeighborhoods frd;
  LevelOps ops;
  Box valid;
  ConsField U;
  ConsField Uold;
  double t = 0.0;
  double t_old = 0.0;
  double dt = 0.0;

  bool active() const { return !valid.empty(); }
};

/// Composite bookkeeping for one coarse step.
struct StepTotals {
  State before{};     // composite totals at the start of the step
  State after{};      // composite totals at the end of the step
  State bflux{};      // gain through domain boundary faces and the embedded boundary
  State sync{};       // composite change produced by synchronization
  State unapplied{};  // register content that was accumulated but not applied
  double cf_mass = 0.0;
};

class Hierarchy {
 public:
  /// Geometry is built on the finest level from `fn` and coarsened level by level.
  Hierarchy(const ImplicitFunction& fn, const Box& base_domain, double dx0, double dy0, Point origin, int nlevels,
            const AmrOptions& opt);

  int num_levels() const { return static_cast<int>(levels_.size()); }
  int finest() const;
  Level& level(int l) { return *levels_[l]; }
  const Level& level(int l) const { return *levels_[l]; }
  const AmrOptions& options() const { return opt_; }
  double time() const { return levels_[0]->t; }

  /// Set the valid box of level l > 0 (level index space, aligned to the coarser level).
  /// Overlapping data is kept; new cells are interpolated from level l - 1.
  void set_valid(int l, const Box& b);
  /// Fill every active level from a primitive state at cell centroids, then average down.
  void initialize(const std::function<Prim(Point)>& init);

  double stable_dt() const;
  /// One coarse step with subcycled finer levels and synchronization.
  StepTotals advance(double dt0);
  /// Sum of V U over fine valid cells and uncovered coarse cells.
  State composite_totals() const;

  /// Tag level-l cells whose density jumps by more than `threshold` across an open face, buffer by
  /// `buffer`, and cover the tags with one box on level l + 1 (removed if nothing is tagged).
  void regrid(int l, double threshold, int buffer = 2);
  bool properly_nested() const;

  /// Covered coarse box of level l (coarsened valid box of l + 1), empty if l is finest.
  Box covered(int l) const;
  const FluxRegister& flux_register(int l) const { return freg_[l]; }
  const RedistRegister& redist_register(int l) const { return rreg_[l]; }
  const Array2<State>& applied_correction(int l) const { return dRbold_[l]; }

  void fill_ghost(int l, ConsField& U, double t) const;
  void average_down(int l);

 private:
  void advance_level(int l, double t, double dt);
  void synchronize(int l);
  void interpolate_from_coarse(int l, ConsField& U, double t, const Box& keep) const;
  void inject(int l, IntVect c, const State& inc);
  void allocate(int l);

  AmrOptions opt_;
  std::vector<std::unique_ptr<Level>> levels_;
  std::vector<FluxRegister> freg_;
  std::vector<RedistRegister> rreg_;
  std::vector<Array2<State>> dRbold_;
  StepTotals step_{};
};

}  // namespace ebamr
