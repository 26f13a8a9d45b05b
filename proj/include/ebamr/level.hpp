#pragma once

#include <functional>
#include <vector>

#include "ebamr/frd.hpp"
#include "ebamr/godunov.hpp"
#include "ebamr/wsrd.hpp"

namespace ebamr {

enum class Integrator { godunov, mol };
enum class Redistribution { wsrd_normal, wsrd_central, frd };

inline bool is_wsrd(Redistribution r) { return r != Redistribution::frd; }

/// Static per-level operators and settings used by a level advance.
struct LevelOps {
  const LevelGeometry* geom = nullptr;
  const WsrdOperator* wsrd = nullptr;
  const FrdNeighborhoods* frd = nullptr;
  DomainBc bc{};
  Gas gas{};
  Redistribution redist = Redistribution::wsrd_normal;
  WsrdOptions wsrd_opt{};
  bool density_weighted = false;
};

/// What the synchronization needs to know about one redistribution stage of a level step.
struct StageRecord {
  double weight = 1.0;  // temporal weight of the stage in the step
  double dt = 0.0;
  FaceFluxes fluxes;
  ConsField Uhat;                     // provisional state (state redistribution)
  std::array<Array2<State>, 2> grad;  // neighborhood gradients (state redistribution)
  std::vector<Transfer> transfers;    // extensive rates moved by flux redistribution
};

struct StepResult {
  ConsField U;
  std::vector<StageRecord> stages;
};

/// Fills every cell of the field outside the level's valid region at time t.
using GhostFill = std::function<void(ConsField&, double)>;

/// One stabilized forward-Euler update U + dt*rate on `region` using the level's
/// redistribution scheme. `rate` must cover region grown by 4 (WSRD) or 2 (FRD).
ConsField stabilized_update(const ConsField& U, const RateResult& rate, double dt, const LevelOps& ops,
                            const Box& region, StageRecord& rec);

/// Single-step Godunov advance of the valid `region`; U must be filled on region grown by 9.
StepResult advance_godunov(const ConsField& U, double dt, const LevelOps& ops, const Box& region);

/// Dispatch on the integrator. `fill` is used between MOL stages.
StepResult level_step(Integrator integ, const ConsField& U, double t, double dt, const LevelOps& ops,
                      const Box& region, const GhostFill& fill);

/// Throws NegativeDensity/NegativePressure with the cell if any fluid state in `region` is invalid.
void check_states(const ConsField& U, const LevelGeometry& geom, const Box& region, const Gas& gas);

}  // namespace ebamr
