#include "ebamr/level.hpp"

#include "ebamr/errors.hpp"
#include "ebamr/mol.hpp"

namespace ebamr {

void check_states(const ConsField& U, const LevelGeometry& geom, const Box& region, const Gas& gas) {
  for_each_cell(region.intersect(geom.domain()), [&](int i, int j) {
    if (!geom.is_fluid(i, j)) return;
    try {
      (void)cons_to_prim(U(i, j), gas);
    } catch (SolverError& e) {
      e.at_cell({i, j});
      throw;
    }
  });
}

ConsField stabilized_update(const ConsField& U, const RateResult& rate, double dt, const LevelOps& ops,
                            const Box& region, StageRecord& rec) {
  const LevelGeometry& g = *ops.geom;
  const Box valid = region.intersect(g.domain());
  ConsField out = U;
  if (is_wsrd(ops.redist)) {
    ConsField Uh = U;
    for_each_cell(valid.grow(4).intersect(g.domain()), [&](int i, int j) {
      if (g.is_fluid(i, j)) Uh(i, j) += dt * rate.dU(i, j);
    });
    WsrdResult res = redistribute(Uh, g, *ops.wsrd, valid, ops.wsrd_opt);
    for_each_cell(valid, [&](int i, int j) {
      if (g.is_fluid(i, j)) out(i, j) = res.U(i, j);
    });
    rec.Uhat = std::move(Uh);
    rec.grad = std::move(res.grad);
  } else {
    FrdResult fr = frd_apply(rate.dU, g, *ops.frd, valid.grow(1).intersect(g.domain()),
                             ops.density_weighted ? &U : nullptr);
    for_each_cell(valid, [&](int i, int j) {
      if (g.is_fluid(i, j)) out(i, j) += dt * fr.dU(i, j);
    });
    rec.transfers = std::move(fr.transfers);
  }
  rec.fluxes = rate.fluxes;
  check_states(out, g, valid, ops.gas);
  return out;
}

namespace {

Box rate_region(const LevelOps& ops, const Box& region) {
  return region.grow(is_wsrd(ops.redist) ? 4 : 2).intersect(ops.geom->domain());
}

}  // namespace

StepResult advance_godunov(const ConsField& U, double dt, const LevelOps& ops, const Box& region) {
  StepResult r;
  r.stages.resize(1);
  r.stages[0].weight = 1.0;
  r.stages[0].dt = dt;
  const RateResult rate = godunov_rate(U, dt, *ops.geom, ops.bc, rate_region(ops, region), ops.gas);
  r.U = stabilized_update(U, rate, dt, ops, region, r.stages[0]);
  return r;
}

StepResult level_step(Integrator integ, const ConsField& U, double t, double dt, const LevelOps& ops,
                      const Box& region, const GhostFill& fill) {
  if (integ == Integrator::godunov) return advance_godunov(U, dt, ops, region);
  return advance_mol(U, t, dt, ops, region, fill);
}

}  // namespace ebamr
