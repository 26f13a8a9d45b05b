#pragma once

#include <array>

#include "ebamr/level.hpp"

namespace ebamr {

/// Predictor/corrector stage weights for the synchronization registers.
inline constexpr std::array<double, 2> kMolStageWeights{0.5, 0.5};

/// Unredistributed MOL rate: MC-limited MUSCL states, Riemann fluxes, conservative divergence.
RateResult mol_rhs(const ConsField& U, const LevelGeometry& geom, const DomainBc& bc, const Box& region,
                   const Gas& gas);

/// (R(U + dt dUc) - U) / dt on `region`; dUc must cover region grown by 4.
Array2<State> wsrd_increment(const ConsField& U, const Array2<State>& dUc, double dt, const LevelGeometry& geom,
                             const WsrdOperator& op, const Box& region, const WsrdOptions& opt = {});

/// Two-stage predictor/corrector: U* = U + dt dU(U), U' = (U + U* + dt dU(U*)) / 2, with each
/// stage stabilized by the level's redistribution. Ghosts of U* are refilled at t + dt.
StepResult advance_mol(const ConsField& U, double t, double dt, const LevelOps& ops, const Box& region,
                       const GhostFill& fill);

}  // namespace ebamr
