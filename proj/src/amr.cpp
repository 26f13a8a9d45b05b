#include "ebamr/amr.hpp"

#include <cmath>

#include "ebamr/bc.hpp"
#include "ebamr/diagnostics.hpp"
#include "ebamr/errors.hpp"

namespace ebamr {

namespace {

double mc(double dl, double dr) {
  if (dl * dr <= 0.0) return 0.0;
  const double s = dl > 0.0 ? 1.0 : -1.0;
  return s * std::min({2.0 * std::abs(dl), 2.0 * std::abs(dr), 0.5 * std::abs(dl + dr)});
}

Box intersect_or_empty(const Box& a, const Box& b) {
  if (a.empty() || b.empty()) return Box{};
  const Box c = a.intersect(b);
  return c.empty() ? Box{} : c;
}

}  // namespace

Hierarchy::Hierarchy(const ImplicitFunction& fn, const Box& base_domain, double dx0, double dy0, Point origin,
                     int nlevels, const AmrOptions& opt)
    : opt_(opt) {
  if (nlevels < 1) throw std::invalid_argument("at least one level is required");
  const int rf = 1 << (nlevels - 1);
  std::vector<LevelGeometry> geoms(nlevels);
  geoms[nlevels - 1] = build_geometry(fn, base_domain.refine(rf), dx0 / rf, dy0 / rf, origin);
  for (int l = nlevels - 2; l >= 0; --l) geoms[l] = coarsen_geometry(geoms[l + 1], kRefRatio);
  for (int l = 0; l < nlevels; ++l) {
    auto lev = std::make_unique<Level>();
    lev->geom = std::move(geoms[l]);
    extend_geometry_ghosts(lev->geom, opt_.bc);
    if (is_wsrd(opt_.redist)) {
      lev->wsrd = make_wsrd(lev->geom, opt_.redist == Redistribution::wsrd_central ? MergeStrategy::central
                                                                                    : MergeStrategy::normal);
    }
    lev->frd = FrdNeighborhoods(lev->geom);
    lev->ops.geom = &lev->geom;
    lev->ops.wsrd = &lev->wsrd;
    lev->ops.frd = &lev->frd;
    lev->ops.bc = opt_.bc;
    lev->ops.gas = opt_.gas;
    lev->ops.redist = opt_.redist;
    lev->ops.wsrd_opt = opt_.wsrd_opt;
    lev->ops.wsrd_opt.gamma = opt_.gas.gamma;
    lev->ops.density_weighted = opt_.density_weighted;
    levels_.push_back(std::move(lev));
  }
  freg_.resize(nlevels);
  rreg_.resize(nlevels);
  dRbold_.resize(nlevels);
  levels_[0]->valid = levels_[0]->geom.domain();
  allocate(0);
}

void Hierarchy::allocate(int l) {
  Level& L = *levels_[l];
  if (L.valid.empty()) {
    L.U = ConsField();
    L.Uold = ConsField();
    return;
  }
  L.U = ConsField(L.valid.grow(kFieldGhost).intersect(L.geom.box()), State{1.0, 0.0, 0.0, 2.5});
  L.Uold = L.U;
}

int Hierarchy::finest() const {
  int f = 0;
  while (f + 1 < num_levels() && levels_[f + 1]->active()) ++f;
  return f;
}

Box Hierarchy::covered(int l) const {
  if (l + 1 >= num_levels() || !levels_[l + 1]->active()) return Box{};
  return levels_[l + 1]->valid.coarsen(kRefRatio);
}

void Hierarchy::initialize(const std::function<Prim(Point)>& init) {
  for (int l = 0; l <= finest(); ++l) {
    Level& L = *levels_[l];
    for_each_cell(L.U.box(), [&](int i, int j) {
      const Point x = L.geom.is_fluid(i, j) ? L.geom.cell_centroid(i, j) : L.geom.cell_center(i, j);
      L.U(i, j) = prim_to_cons(init(x), opt_.gas);
    });
    L.Uold = L.U;
    L.t = L.t_old = 0.0;
  }
  for (int l = finest() - 1; l >= 0; --l) average_down(l);
}

void Hierarchy::interpolate_from_coarse(int l, ConsField& U, double t, const Box& keep) const {
  const Level& L = *levels_[l];
  const Level& C = *levels_[l - 1];
  const LevelGeometry& fg = L.geom;
  const LevelGeometry& cg = C.geom;
  double tau = 1.0;
  if (C.dt > 0.0) tau = std::clamp((t - C.t_old) / C.dt, 0.0, 1.0);
  if (std::abs(t - C.t) <= 1e-12 * std::max(1.0, std::abs(t))) tau = 1.0;
  auto cval = [&](IntVect I) -> State {
    if (tau == 1.0 || C.Uold.size() == 0) return C.U(I);
    if (tau == 0.0) return C.Uold(I);
    return (1.0 - tau) * C.Uold(I) + tau * C.U(I);
  };
  auto usable = [&](IntVect I) { return cg.domain().contains(I) && C.U.box().contains(I) && cg.is_fluid(I.i, I.j); };
  const Box fregion = U.box().intersect(fg.domain());
  for_each_cell(fregion.coarsen(kRefRatio), [&](int ci, int cj) {
    const IntVect I{ci, cj};
    const Box kids = Box(I, I).refine(kRefRatio).intersect(fregion);
    bool needed = false;
    for_each_cell(kids, [&](int i, int j) { needed = needed || !keep.contains(i, j); });
    if (!needed) return;
    const State Uc = cval(I);
    if (!cg.is_fluid(ci, cj)) {
      for_each_cell(kids, [&](int i, int j) {
        if (!keep.contains(i, j)) U(i, j) = Uc;
      });
      return;
    }
    State s[2] = {State{}, State{}};
    for (int d = 0; d < 2; ++d) {
      const IntVect m = I - unit(d), p = I + unit(d);
      if (!usable(m) || !usable(p)) continue;
      const State um = cval(m), up = cval(p);
      for (int k = 0; k < kNcomp; ++k) s[d][k] = mc(Uc[k] - um[k], up[k] - Uc[k]);
    }
    // Children of the full parent, linear reconstruction, then a constant shift so that the
    // fluid children carry exactly the parent's content.
    const Box all = Box(I, I).refine(kRefRatio);
    State vsum{};
    double vf = 0.0;
    std::array<State, 4> val;
    int n = 0;
    for_each_cell(all, [&](int i, int j) {
      const double ox = (i - 2 * ci) == 0 ? -0.25 : 0.25, oy = (j - 2 * cj) == 0 ? -0.25 : 0.25;
      val[n] = Uc + ox * s[0] + oy * s[1];
      if (fg.is_fluid(i, j)) {
        vsum += fg.volume(i, j) * val[n];
        vf += fg.volume(i, j);
      }
      ++n;
    });
    bool ok = true;
    if (vf > 0.0) {
      const State shift = (1.0 / vf) * (cg.volume(ci, cj) * Uc - vsum);
      n = 0;
      for_each_cell(all, [&](int i, int j) {
        val[n] += shift;
        if (fg.is_fluid(i, j) && !valid_state(val[n], opt_.gas)) ok = false;
        ++n;
      });
    }
    n = 0;
    for_each_cell(all, [&](int i, int j) {
      if (kids.contains(i, j) && !keep.contains(i, j)) U(i, j) = (ok && fg.is_fluid(i, j)) ? val[n] : Uc;
      ++n;
    });
  });
}

void Hierarchy::fill_ghost(int l, ConsField& U, double t) const {
  const Level& L = *levels_[l];
  if (l > 0) interpolate_from_coarse(l, U, t, L.valid);
  fill_physical_bc(U, L.geom.domain(), opt_.bc);
}

void Hierarchy::average_down(int l) {
  const Box cov = covered(l);
  if (cov.empty()) return;
  Level& C = *levels_[l];
  const Level& F = *levels_[l + 1];
  for_each_cell(cov, [&](int ci, int cj) {
    if (!C.geom.is_fluid(ci, cj)) return;
    State s{};
    double v = 0.0;
    for_each_cell(Box({ci, cj}, {ci, cj}).refine(kRefRatio), [&](int i, int j) {
      if (!F.geom.is_fluid(i, j)) return;
      s += F.geom.volume(i, j) * F.U(i, j);
      v += F.geom.volume(i, j);
    });
    if (!(v > 0.0)) {
      throw SolverError(SolverError::Kind::EmptyFluid, "covered fluid cell without fluid children")
          .at_cell({ci, cj})
          .at_level(l);
    }
    C.U(ci, cj) = (1.0 / v) * s;
  });
}

void Hierarchy::set_valid(int l, const Box& b) {
  if (l <= 0 || l >= num_levels()) throw std::invalid_argument("set_valid: level out of range");
  Level& L = *levels_[l];
  const Box nb = intersect_or_empty(b, L.geom.domain());
  if (!nb.empty() && !(nb.coarsen(kRefRatio).refine(kRefRatio) == nb)) {
    throw std::invalid_argument("set_valid: box not aligned with the coarser level");
  }
  const Box old = L.valid;
  ConsField oldU = std::move(L.U);
  L.valid = nb;
  allocate(l);
  if (nb.empty()) {
    for (int m = l + 1; m < num_levels(); ++m) {
      levels_[m]->valid = Box{};
      allocate(m);
    }
    return;
  }
  const Level& C = *levels_[l - 1];
  L.t = L.t_old = C.t;
  L.dt = 0.0;
  const Box kept = intersect_or_empty(old, nb);
  if (!kept.empty()) {
    for_each_cell(kept, [&](int i, int j) { L.U(i, j) = oldU(i, j); });
  }
  interpolate_from_coarse(l, L.U, C.t, kept.empty() ? Box{} : kept);
  fill_physical_bc(L.U, L.geom.domain(), opt_.bc);
  L.Uold = L.U;
  average_down(l - 1);
}

bool Hierarchy::properly_nested() const {
  for (int l = 1; l <= finest(); ++l) {
    const Level& L = *levels_[l];
    const Level& P = *levels_[l - 1];
    const Box cb = L.valid.coarsen(kRefRatio);
    if (!P.valid.contains(cb)) return false;
    if (l == 1) continue;
    // Margin from the parent's own coarse/fine boundary, except along the physical boundary.
    const Box dom = P.geom.domain();
    Box inner = P.valid;
    for (int d = 0; d < 2; ++d) {
      if (inner.lo[d] > dom.lo[d]) inner.lo[d] += opt_.nesting_margin;
      if (inner.hi[d] < dom.hi[d]) inner.hi[d] -= opt_.nesting_margin;
    }
    if (!inner.contains(cb)) return false;
  }
  return true;
}

State Hierarchy::composite_totals() const {
  State s{};
  for (int l = 0; l <= finest(); ++l) {
    const Level& L = *levels_[l];
    const Box cov = covered(l);
    for_each_cell(L.valid, [&](int i, int j) {
      if (!L.geom.is_fluid(i, j) || (!cov.empty() && cov.contains(i, j))) return;
      s += L.geom.volume(i, j) * L.U(i, j);
    });
  }
  return s;
}

double Hierarchy::stable_dt() const {
  double dt = std::numeric_limits<double>::infinity();
  for (int l = 0; l <= finest(); ++l) {
    const Level& L = *levels_[l];
    const double s = max_wavespeed(L.U, L.geom, L.valid, opt_.gas);
    const double h = std::min(L.geom.dx(), L.geom.dy());
    dt = std::min(dt, opt_.cfl * h / s * static_cast<double>(1 << l));
  }
  return dt;
}

StepTotals Hierarchy::advance(double dt0) {
  step_ = StepTotals{};
  step_.before = composite_totals();
  advance_level(0, levels_[0]->t, dt0);
  step_.after = composite_totals();
  return step_;
}

void Hierarchy::advance_level(int l, double t, double dt) {
  Level& L = *levels_[l];
  fill_ghost(l, L.U, t);
  L.Uold = L.U;
  L.t_old = t;
  L.dt = dt;
  const bool has_fine = l < finest();
  const Box cov = covered(l);
  if (has_fine) {
    freg_[l] = FluxRegister(cov, L.geom.domain());
    rreg_[l] = RedistRegister(cov, L.geom.domain());
  }
  StepResult r;
  try {
    r = level_step(opt_.integrator, L.U, t, dt, L.ops, L.valid,
                   [this, l](ConsField& U, double tt) { fill_ghost(l, U, tt); });
  } catch (SolverError& e) {
    e.at_level(l);
    throw;
  }
  L.U = std::move(r.U);
  L.t = t + dt;
  const bool wsrd = is_wsrd(opt_.redist);
  const bool grads = wsrd && opt_.wsrd_opt.gradients;
  for (const StageRecord& s : r.stages) {
    const double sc = s.weight * s.dt;
    step_.bflux += sc * boundary_gain(s.fluxes, L.geom, L.valid, cov);
    if (has_fine) {
      accumulate_coarse(freg_[l], s.fluxes, L.geom, sc);
      if (wsrd) {
        accumulate_wsrd_coarse(rreg_[l], L.geom, L.wsrd.A, s.Uhat, s.weight);
        if (grads) accumulate_gradient_terms_coarse(rreg_[l], L.geom, L.wsrd.A, s.grad, s.weight);
      } else {
        accumulate_frd_coarse(rreg_[l], s.transfers, sc);
      }
    }
    if (l > 0) {
      const double before = freg_[l - 1].cf_mass;
      accumulate_fine(freg_[l - 1], s.fluxes, L.geom, sc);
      if (l == 1) step_.cf_mass += freg_[l - 1].cf_mass - before;
      if (wsrd) {
        accumulate_wsrd_fine(rreg_[l - 1], L.geom, L.wsrd.A, s.Uhat, L.valid, s.weight);
        if (grads) accumulate_gradient_terms_fine(rreg_[l - 1], L.geom, L.wsrd.A, s.grad, L.valid, s.weight);
      } else {
        accumulate_frd_fine(rreg_[l - 1], s.transfers, L.valid, sc);
      }
    }
  }
  if (has_fine) {
    fill_ghost(l, L.U, L.t);
    const double h = 0.5 * dt;
    advance_level(l + 1, t, h);
    advance_level(l + 1, t + h, h);
    synchronize(l);
  }
}

void Hierarchy::inject(int l, IntVect c, const State& inc) {
  for (int m = l + 1; m <= finest(); ++m) {
    Level& F = *levels_[m];
    const int r = 1 << (m - l);
    const Box kids = intersect_or_empty(Box(c, c).refine(r), F.valid);
    if (kids.empty()) break;
    for_each_cell(kids, [&](int i, int j) {
      if (!F.geom.is_fluid(i, j)) return;
      F.U(i, j) += inc;
      if (!valid_state(F.U(i, j), opt_.gas)) {
        throw SolverError(SolverError::Kind::NegativeStateAfterSync, "invalid fine state after synchronization")
            .at_cell({i, j})
            .at_level(m);
      }
    });
  }
}

void Hierarchy::synchronize(int l) {
  Level& C = *levels_[l];
  const Box cov = covered(l);
  const State before = composite_totals();
  average_down(l);
  const RedistRegister& rr = rreg_[l];
  Array2<State> dRb(rr.window, State{});
  const Array2<State> dFc = reflux_by_cell(freg_[l]);
  for_each_cell(dFc.box().intersect(rr.window), [&](int i, int j) {
    if (opt_.refluxing) dRb(i, j) += dFc(i, j);
    else step_.unapplied += dFc(i, j);
  });
  for_each_cell(rr.window, [&](int i, int j) {
    const State d = rr.dR_coarse(i, j) + rr.dR_fine(i, j);
    if (opt_.rerd) dRb(i, j) += d;
    else step_.unapplied += d;
  });
  try {
    apply_sync(C.U, C.geom, C.frd, dRb, cov, [&](IntVect q, const State& inc) { inject(l, q, inc); }, opt_.gas);
  } catch (SolverError& e) {
    e.at_level(l);
    throw;
  }
  dRbold_[l] = std::move(dRb);
  step_.sync += composite_totals() - before;
}

void Hierarchy::regrid(int l, double threshold, int buffer) {
  if (l + 1 >= num_levels()) return;
  const Level& L = *levels_[l];
  const LevelGeometry& g = L.geom;
  Box tags{{1 << 30, 1 << 30}, {-(1 << 30), -(1 << 30)}};
  bool any = false;
  for_each_cell(L.valid, [&](int i, int j) {
    if (!g.is_fluid(i, j)) return;
    bool tag = false;
    for (int d = 0; d < 2 && !tag; ++d) {
      for (int s = 0; s < 2 && !tag; ++s) {
        const IntVect n = IntVect{i, j} + (s ? unit(d) : IntVect{-unit(d).i, -unit(d).j});
        const IntVect f = s ? n : IntVect{i, j};
        if (!L.valid.contains(n) || !g.is_fluid(n.i, n.j) || g.area_frac(d, f.i, f.j) <= 0.0) continue;
        tag = std::abs(L.U(n)[0] - L.U(i, j)[0]) > threshold;
      }
    }
    if (!tag) return;
    any = true;
    tags.lo = {std::min(tags.lo.i, i), std::min(tags.lo.j, j)};
    tags.hi = {std::max(tags.hi.i, i), std::max(tags.hi.j, j)};
  });
  if (!any) {
    set_valid(l + 1, Box{});
    return;
  }
  Box b = tags.grow(buffer).intersect(g.domain());
  if (l > 0) {
    const Box dom = g.domain();
    Box inner = L.valid;
    for (int d = 0; d < 2; ++d) {
      if (inner.lo[d] > dom.lo[d]) inner.lo[d] += opt_.nesting_margin;
      if (inner.hi[d] < dom.hi[d]) inner.hi[d] -= opt_.nesting_margin;
    }
    b = intersect_or_empty(b, inner);
  }
  set_valid(l + 1, b.empty() ? Box{} : b.refine(kRefRatio));
}

}  // namespace ebamr
