#include "ebamr/godunov.hpp"

#include <algorithm>
#include <cmath>

namespace ebamr {

namespace {

State to_normal(const State& w, int d) { return d == 0 ? w : State{w[0], w[2], w[1], w[3]}; }

bool valid_prim(const State& w) { return w[0] > 0.0 && w[3] > 0.0 && std::isfinite(w[1]) && std::isfinite(w[2]); }

bool try_prim(const State& U, const Gas& gas, State& w) {
  if (!(U[0] > 0.0)) return false;
  const double u = U[1] / U[0], v = U[2] / U[0];
  const double p = (gas.gamma - 1.0) * (U[3] - 0.5 * (U[1] * u + U[2] * v));
  if (!(p > 0.0)) return false;
  w = {U[0], u, v, p};
  return true;
}

double mc_limit(double dl, double dr, double dc) {
  if (dl * dr <= 0.0) return 0.0;
  const double lim = 2.0 * std::min(std::abs(dl), std::abs(dr));
  return std::copysign(std::min(std::abs(dc), lim), dc);
}

/// Characteristic tracing of one cell in the normal frame to its low and high faces.
void trace(const State& w, const State& dw, double dtdx, double g, State& lo, State& hi) {
  const double rho = w[0], u = w[1], p = w[3];
  const double c = std::sqrt(g * p / rho);
  const double c2 = c * c;
  const std::array<double, 4> lam{u - c, u, u, u + c};
  const std::array<double, 4> a{(dw[3] - rho * c * dw[1]) / (2.0 * c2), dw[0] - dw[3] / c2, dw[2],
                                (dw[3] + rho * c * dw[1]) / (2.0 * c2)};
  const std::array<State, 4> r{State{1.0, -c / rho, 0.0, c2}, State{1.0, 0.0, 0.0, 0.0}, State{0.0, 0.0, 1.0, 0.0},
                               State{1.0, c / rho, 0.0, c2}};
  const double nup = std::max(lam[3], 0.0) * dtdx;
  const double num = std::min(lam[0], 0.0) * dtdx;
  hi = w + (0.5 * (1.0 - nup)) * dw;
  lo = w - (0.5 * (1.0 + num)) * dw;
  for (int k = 0; k < 4; ++k) {
    const double nuk = lam[k] * dtdx;
    if (lam[k] > 0.0) hi += (0.5 * (nup - nuk) * a[k]) * r[k];
    if (lam[k] < 0.0) lo += (0.5 * (num - nuk) * a[k]) * r[k];
  }
}

}  // namespace

PrimField primitive_field(const ConsField& U, const LevelGeometry& geom, const Box& region, const Gas& gas) {
  PrimField W(U.box(), State{});
  for_each_cell(region.intersect(U.box()), [&](int i, int j) {
    if (!geom.is_fluid(i, j)) return;
    try {
      W(i, j) = to_vec(cons_to_prim(U(i, j), gas));
    } catch (SolverError& e) {
      e.at_cell({i, j});
      throw;
    }
  });
  return W;
}

Array2<State> slopes(const PrimField& W, const LevelGeometry& geom, int dir, const Box& region, int order) {
  Array2<State> s(W.box(), State{});
  const IntVect e = unit(dir);
  auto open = [&](int i, int j) { return geom.area_frac(dir, i, j) > 0.0; };  // low face of (i,j)
  auto second = [&](int i, int j, State& out) {
    if (!geom.is_fluid(i, j) || !open(i, j) || !open(i + e.i, j + e.j)) return false;
    const State& wm = W(i - e.i, j - e.j);
    const State& w0 = W(i, j);
    const State& wp = W(i + e.i, j + e.j);
    for (int k = 0; k < kNcomp; ++k) out[k] = mc_limit(w0[k] - wm[k], wp[k] - w0[k], 0.5 * (wp[k] - wm[k]));
    return true;
  };
  for_each_cell(region, [&](int i, int j) {
    if (!geom.is_fluid(i, j)) return;
    State d2{};
    if (!second(i, j, d2)) return;
    if (order >= 4 && open(i - e.i, j - e.j) && open(i + 2 * e.i, j + 2 * e.j)) {
      State dm{}, dp{};
      second(i - e.i, j - e.j, dm);
      second(i + e.i, j + e.j, dp);
      const State& wm = W(i - e.i, j - e.j);
      const State& w0 = W(i, j);
      const State& wp = W(i + e.i, j + e.j);
      State d4{};
      for (int k = 0; k < kNcomp; ++k) {
        const double f = 2.0 / 3.0 * (wp[k] - wm[k]) - (dm[k] + dp[k]) / 6.0;
        d4[k] = mc_limit(w0[k] - wm[k], wp[k] - w0[k], f);
      }
      s(i, j) = d4;
    } else {
      s(i, j) = d2;
    }
  });
  return s;
}

State face_flux(const State& WL, const State& WR, int d, int i, int j, const LevelGeometry& geom,
                const DomainBc& bc, const Gas& gas) {
  const int n = d == 0 ? i : j;
  const Box& dom = geom.domain();
  const bool at_lo = n == dom.lo[d] && bc.lo(d) == BcType::wall;
  const bool at_hi = n == dom.hi[d] + 1 && bc.hi(d) == BcType::wall;
  try {
    if (at_lo || at_hi) {
      const State& w = at_lo ? WR : WL;
      const double un = w[1 + d];
      const double pw = wall_pressure(w[0], w[3], at_lo ? -un : un, gas);
      State F{};
      F[1 + d] = pw;
      return F;
    }
    return riemann_two_shock(to_prim(WL), to_prim(WR), d, gas);
  } catch (SolverError& e) {
    e.at_cell({i, j});
    throw;
  }
}

FaceStates predict_faces(const ConsField& U, const PrimField& W, const std::array<Array2<State>, 2>& dW,
                         double dt, const LevelGeometry& geom, const DomainBc& bc, const Box& region,
                         const Gas& gas) {
  const double g = gas.gamma;
  const Box T = region.grow(1);
  // One-dimensional traced states: lo1[d](c) at the low face of c, hi1[d](c) at its high face.
  std::array<Array2<State>, 2> lo1{Array2<State>(U.box()), Array2<State>(U.box())};
  std::array<Array2<State>, 2> hi1{Array2<State>(U.box()), Array2<State>(U.box())};
  for (int d = 0; d < 2; ++d) {
    const double dtdx = dt / geom.h(d);
    for_each_cell(T, [&](int i, int j) {
      if (!geom.is_fluid(i, j)) return;
      const State w = W(i, j);
      State lo, hi;
      trace(to_normal(w, d), to_normal(dW[d](i, j), d), dtdx, g, lo, hi);
      lo = to_normal(lo, d);
      hi = to_normal(hi, d);
      lo1[d](i, j) = valid_prim(lo) ? lo : w;
      hi1[d](i, j) = valid_prim(hi) ? hi : w;
    });
  }
  // Transverse fluxes on the faces normal to t of the donor cells for direction 1 - t.
  std::array<Array2<State>, 2> G{Array2<State>(U.box().faces(0)), Array2<State>(U.box().faces(1))};
  for (int t = 0; t < 2; ++t) {
    const IntVect e = unit(t);
    const Box donors = region.grow(1 - t, 1);
    for_each_cell(donors.faces(t), [&](int i, int j) {
      if (geom.area_frac(t, i, j) <= 0.0) return;
      G[t](i, j) = face_flux(hi1[t](i - e.i, j - e.j), lo1[t](i, j), t, i, j, geom, bc, gas);
    });
  }
  FaceStates out;
  for (int d = 0; d < 2; ++d) {
    out.left[d] = Array2<State>(U.box().faces(d));
    out.right[d] = Array2<State>(U.box().faces(d));
  }
  for (int d = 0; d < 2; ++d) {
    const int t = 1 - d;
    const IntVect e = unit(d), et = unit(t);
    const double coef = 0.5 * dt / geom.h(t);
    for_each_cell(region.grow(d, 1), [&](int i, int j) {
      if (!geom.is_fluid(i, j)) return;
      State lo = lo1[d](i, j), hi = hi1[d](i, j);
      if (geom.area_frac(t, i, j) > 0.0 && geom.area_frac(t, i + et.i, j + et.j) > 0.0) {
        const State dG = coef * (G[t](i + et.i, j + et.j) - G[t](i, j));
        State w;
        if (try_prim(prim_to_cons(to_prim(lo), gas) - dG, gas, w)) lo = w;
        if (try_prim(prim_to_cons(to_prim(hi), gas) - dG, gas, w)) hi = w;
      }
      if (out.right[d].box().contains(i, j)) out.right[d](i, j) = lo;
      if (out.left[d].box().contains(i + e.i, j + e.j)) out.left[d](i + e.i, j + e.j) = hi;
    });
  }
  return out;
}

FaceFluxes compute_fluxes(const FaceStates& s, const ConsField& U, const LevelGeometry& geom, const DomainBc& bc,
                          const Box& region, const Gas& gas) {
  FaceFluxes F;
  for (int d = 0; d < 2; ++d) {
    F.f[d] = Array2<State>(U.box().faces(d));
    for_each_cell(region.faces(d), [&](int i, int j) {
      if (geom.area_frac(d, i, j) <= 0.0) return;
      F.f[d](i, j) = face_flux(s.left[d](i, j), s.right[d](i, j), d, i, j, geom, bc, gas);
    });
  }
  F.eb = Array2<State>(U.box());
  for_each_cell(region, [&](int i, int j) {
    if (!geom.is_cut(i, j) || geom.eb_area(i, j) == 0.0) return;
    try {
      F.eb(i, j) = eb_wall_flux(U(i, j), geom.eb_normal(i, j), gas);
    } catch (SolverError& e) {
      e.at_cell({i, j});
      throw;
    }
  });
  return F;
}

void centroid_correct_fluxes(FaceFluxes& F, const LevelGeometry& geom, const Box& region) {
  for (int d = 0; d < 2; ++d) {
    const IntVect et = unit(1 - d);
    const Array2<State> orig = F.f[d];
    for_each_cell(region.faces(d), [&](int i, int j) {
      const double a = geom.area_frac(d, i, j);
      if (a <= 0.0 || a >= 1.0) return;
      const double c = geom.face_centroid(d, i, j);
      if (c == 0.0) return;
      const int s = c > 0.0 ? 1 : -1;
      const int in = i + s * et.i, jn = j + s * et.j;
      if (!orig.box().contains(in, jn) || geom.area_frac(d, in, jn) <= 0.0) return;
      F.f[d](i, j) = orig(i, j) + std::abs(c) * (orig(in, jn) - orig(i, j));
    });
  }
}

Array2<State> conservative_update(const FaceFluxes& F, const LevelGeometry& geom, const Box& region) {
  Array2<State> dU(F.eb.box(), State{});
  for_each_cell(region, [&](int i, int j) {
    if (!geom.is_fluid(i, j)) return;
    State div{};
    for (int d = 0; d < 2; ++d) {
      const IntVect e = unit(d);
      const double alo = geom.face_area(d, i, j), ahi = geom.face_area(d, i + e.i, j + e.j);
      if (ahi > 0.0) div += ahi * F.f[d](i + e.i, j + e.j);
      if (alo > 0.0) div -= alo * F.f[d](i, j);
    }
    // The wall flux is given along n_f (into the fluid); the outward flux is its negative.
    if (geom.is_cut(i, j) && geom.eb_area(i, j) > 0.0) div -= geom.eb_area(i, j) * F.eb(i, j);
    dU(i, j) = (-1.0 / geom.volume(i, j)) * div;
  });
  return dU;
}

RateResult godunov_rate(const ConsField& U, double dt, const LevelGeometry& geom, const DomainBc& bc,
                        const Box& region, const Gas& gas) {
  const PrimField W = primitive_field(U, geom, region.grow(5), gas);
  const std::array<Array2<State>, 2> dW{slopes(W, geom, 0, region.grow(3)), slopes(W, geom, 1, region.grow(3))};
  const FaceStates s = predict_faces(U, W, dW, dt, geom, bc, region.grow(1), gas);
  RateResult r;
  r.fluxes = compute_fluxes(s, U, geom, bc, region.grow(1), gas);
  centroid_correct_fluxes(r.fluxes, geom, region);
  r.dU = conservative_update(r.fluxes, geom, region);
  return r;
}

RateResult muscl_rate(const ConsField& U, const LevelGeometry& geom, const DomainBc& bc, const Box& region,
                      const Gas& gas) {
  const PrimField W = primitive_field(U, geom, region.grow(4), gas);
  FaceStates s;
  for (int d = 0; d < 2; ++d) {
    const IntVect e = unit(d);
    const Array2<State> dW = slopes(W, geom, d, region.grow(2), 2);
    s.left[d] = Array2<State>(U.box().faces(d));
    s.right[d] = Array2<State>(U.box().faces(d));
    for_each_cell(region.grow(1).grow(d, 1), [&](int i, int j) {
      if (!geom.is_fluid(i, j)) return;
      const State w = W(i, j);
      const State half = 0.5 * dW(i, j);
      if (s.right[d].box().contains(i, j)) s.right[d](i, j) = w - half;
      if (s.left[d].box().contains(i + e.i, j + e.j)) s.left[d](i + e.i, j + e.j) = w + half;
    });
  }
  RateResult r;
  r.fluxes = compute_fluxes(s, U, geom, bc, region.grow(1), gas);
  centroid_correct_fluxes(r.fluxes, geom, region);
  r.dU = conservative_update(r.fluxes, geom, region);
  return r;
}

}  // namespace ebamr
