#include "ebamr/mol.hpp"

namespace ebamr {

namespace {

Box rate_region(const LevelOps& ops, const Box& region) {
  return region.grow(is_wsrd(ops.redist) ? 4 : 2).intersect(ops.geom->domain());
}

}  // namespace

RateResult mol_rhs(const ConsField& U, const LevelGeometry& geom, const DomainBc& bc, const Box& region,
                   const Gas& gas) {
  return muscl_rate(U, geom, bc, region, gas);
}

Array2<State> wsrd_increment(const ConsField& U, const Array2<State>& dUc, double dt, const LevelGeometry& geom,
                             const WsrdOperator& op, const Box& region, const WsrdOptions& opt) {
  const Box valid = region.intersect(geom.domain());
  ConsField Uh = U;
  for_each_cell(valid.grow(4).intersect(geom.domain()), [&](int i, int j) {
    if (geom.is_fluid(i, j)) Uh(i, j) += dt * dUc(i, j);
  });
  const WsrdResult res = redistribute(Uh, geom, op, valid, opt);
  Array2<State> out(U.box(), State{});
  for_each_cell(valid, [&](int i, int j) {
    if (geom.is_fluid(i, j)) out(i, j) = (1.0 / dt) * (res.U(i, j) - U(i, j));
  });
  return out;
}

StepResult advance_mol(const ConsField& U, double t, double dt, const LevelOps& ops, const Box& region,
                       const GhostFill& fill) {
  const LevelGeometry& g = *ops.geom;
  const Box valid = region.intersect(g.domain());
  const Box work = rate_region(ops, region);
  StepResult r;
  r.stages.resize(2);
  for (int s = 0; s < 2; ++s) {
    r.stages[s].weight = kMolStageWeights[s];
    r.stages[s].dt = dt;
  }
  ConsField U1 = stabilized_update(U, mol_rhs(U, g, ops.bc, work, ops.gas), dt, ops, region, r.stages[0]);
  if (fill) fill(U1, t + dt);
  const ConsField U2 = stabilized_update(U1, mol_rhs(U1, g, ops.bc, work, ops.gas), dt, ops, region, r.stages[1]);
  r.U = U;
  for_each_cell(valid, [&](int i, int j) {
    if (g.is_fluid(i, j)) r.U(i, j) = 0.5 * (U(i, j) + U2(i, j));
  });
  return r;
}

}  // namespace ebamr
