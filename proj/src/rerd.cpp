#include "ebamr/rerd.hpp"

#include <ostream>

#include "ebamr/errors.hpp"

namespace ebamr {

RedistRegister::RedistRegister(const Box& cov, const Box& dom) : covered(cov), domain(dom) {
  if (covered.empty()) return;
  window = covered.grow(3).intersect(domain);
  dR_coarse = Array2<State>(window, State{});
  dR_fine = Array2<State>(window, State{});
}

void RedistRegister::reset() {
  dR_coarse.fill(State{});
  dR_fine.fill(State{});
}

RedistMatrix build_R_matrix(const MergeMatrix& A, const LevelGeometry& geom, const Box& rows) {
  RedistMatrix R;
  R.K = CellLists(geom.domain());
  std::vector<std::pair<IntVect, double>> acc;
  for_each_cell(geom.domain(), [&](int i, int j) {
    R.K.begin(i, j);
    if (rows.contains(i, j) && geom.is_fluid(i, j)) {
      acc.clear();
      const double vp = geom.volume(i, j);
      const auto owners = A.cols(i, j);
      const auto ap = A.cols.values(i, j);
      for (std::size_t k = 0; k < owners.size(); ++k) {
        const IntVect r = owners[k];
        const auto members = A.rows(r.i, r.j);
        const auto aq = A.rows.values(r.i, r.j);
        for (std::size_t m = 0; m < members.size(); ++m) {
          const IntVect q = members[m];
          const double c = vp * ap[k] * aq[m] * geom.volume(q.i, q.j) / A.vhat(r);
          auto it = std::find_if(acc.begin(), acc.end(), [&](const auto& e) { return e.first == q; });
          if (it == acc.end()) acc.push_back({q, c});
          else it->second += c;
        }
      }
      for (const auto& [q, c] : acc) R.K.push(q, c);
    }
    R.K.end(i, j);
  });
  return R;
}

State R_row_sum(const RedistMatrix& R, const ConsField& Uhat, IntVect p) {
  State s{};
  const auto cols = R.K(p.i, p.j);
  const auto k = R.K.values(p.i, p.j);
  for (std::size_t m = 0; m < cols.size(); ++m) s += k[m] * Uhat(cols[m]);
  return s;
}

namespace {

// Calls f(a, b, wa*wb/Vhat, R) for each pair of members of each neighborhood R owned in `owners`
// where exactly one of a, b is inside `inside`; a is the one outside.
template <typename F>
void split_pairs(const LevelGeometry& geom, const MergeMatrix& A, const Box& owners, const Box& inside, F&& f) {
  for_each_cell(owners.intersect(geom.domain()), [&](int i, int j) {
    if (!geom.is_fluid(i, j) || A.rows.count(i, j) < 2) return;
    const auto m = A.rows(i, j);
    const auto a = A.rows.values(i, j);
    const double vh = A.vhat(i, j);
    for (std::size_t k = 0; k < m.size(); ++k) {
      const bool ink = inside.contains(m[k]);
      for (std::size_t l = k + 1; l < m.size(); ++l) {
        if (inside.contains(m[l]) == ink) continue;
        const std::size_t o = ink ? l : k, n = ink ? k : l;
        const double c = geom.volume(m[o].i, m[o].j) * a[o] * geom.volume(m[n].i, m[n].j) * a[n] / vh;
        f(m[o], m[n], c, IntVect{i, j});
      }
    }
  });
}

State slope_jump(const std::array<Array2<State>, 2>& grad, IntVect r, Point from, Point to) {
  return (to.x - from.x) * grad[0](r) + (to.y - from.y) * grad[1](r);
}

}  // namespace

void accumulate_wsrd_coarse(RedistRegister& reg, const LevelGeometry& geom, const MergeMatrix& A,
                            const ConsField& Uhat, double weight) {
  if (reg.covered.empty()) return;
  split_pairs(geom, A, reg.covered.grow(1), reg.covered, [&](IntVect u, IntVect c, double w, IntVect) {
    reg.dR_coarse(u) += (weight * w) * (Uhat(u) - Uhat(c));
  });
}

void accumulate_wsrd_fine(RedistRegister& reg, const LevelGeometry& geom, const MergeMatrix& A,
                          const ConsField& Uhat, const Box& valid, double weight) {
  if (reg.covered.empty()) return;
  split_pairs(geom, A, valid.grow(1), valid, [&](IntVect g, IntVect v, double w, IntVect) {
    reg.dR_fine(coarsen(g, 2)) += (weight * w) * (Uhat(v) - Uhat(g));
  });
}

void accumulate_gradient_terms_coarse(RedistRegister& reg, const LevelGeometry& geom, const MergeMatrix& A,
                                      const std::array<Array2<State>, 2>& grad, double weight) {
  if (reg.covered.empty()) return;
  split_pairs(geom, A, reg.covered.grow(1), reg.covered, [&](IntVect u, IntVect c, double w, IntVect r) {
    const Point xu = geom.cell_centroid(u.i, u.j), xc = geom.cell_centroid(c.i, c.j);
    reg.dR_coarse(u) += (weight * w) * slope_jump(grad, r, xu, xc);
  });
}

void accumulate_gradient_terms_fine(RedistRegister& reg, const LevelGeometry& geom, const MergeMatrix& A,
                                    const std::array<Array2<State>, 2>& grad, const Box& valid, double weight) {
  if (reg.covered.empty()) return;
  split_pairs(geom, A, valid.grow(1), valid, [&](IntVect g, IntVect v, double w, IntVect r) {
    const Point xg = geom.cell_centroid(g.i, g.j), xv = geom.cell_centroid(v.i, v.j);
    reg.dR_fine(coarsen(g, 2)) += (weight * w) * slope_jump(grad, r, xv, xg);
  });
}

void accumulate_frd_coarse(RedistRegister& reg, const std::vector<Transfer>& transfers, double scale) {
  if (reg.covered.empty()) return;
  for (const auto& t : transfers) {
    const bool cs = reg.covered.contains(t.src), cd = reg.covered.contains(t.dst);
    if (!cs && cd) reg.dR_coarse(t.src) += scale * t.amount;
    if (cs && !cd) reg.dR_coarse(t.dst) -= scale * t.amount;
  }
}

void accumulate_frd_fine(RedistRegister& reg, const std::vector<Transfer>& transfers, const Box& valid,
                         double scale) {
  if (reg.covered.empty()) return;
  for (const auto& t : transfers) {
    const bool vs = valid.contains(t.src), vd = valid.contains(t.dst);
    if (vs && !vd) reg.dR_fine(coarsen(t.dst, 2)) += scale * t.amount;
    if (!vs && vd) reg.dR_fine(coarsen(t.src, 2)) -= scale * t.amount;
  }
}

Array2<State> combine(const RedistRegister& reg) {
  Array2<State> out = reg.dR_coarse;
  for (std::size_t k = 0; k < out.size(); ++k) out.data()[k] += reg.dR_fine.data()[k];
  return out;
}

void apply_sync(ConsField& U, const LevelGeometry& geom, const FrdNeighborhoods& nbhd, const Array2<State>& dRbold,
                const Box& covered, const CoveredInjection& inject, const Gas& gas) {
  std::vector<IntVect> touched;
  for_each_cell(dRbold.box().intersect(geom.domain()), [&](int i, int j) {
    const State& dR = dRbold(i, j);
    if (dR == State{} || !geom.is_fluid(i, j)) return;
    const double lam = geom.vol_frac(i, j), v = geom.volume(i, j);
    touched.push_back({i, j});
    if (lam >= 1.0) {
      U(i, j) += (1.0 / v) * dR;
      return;
    }
    U(i, j) += (lam / v) * dR;
    const State inc = ((1.0 - lam) / nbhd.volume(i, j)) * dR;
    for (const auto& q : nbhd(i, j)) {
      U(q) += inc;
      touched.push_back(q);
      if (covered.contains(q) && inject) inject(q, inc);
    }
  });
  for (const auto& p : touched) {
    if (!valid_state(U(p), gas)) {
      throw SolverError(SolverError::Kind::NegativeStateAfterSync, "invalid state after synchronization").at_cell(p);
    }
  }
}

void write_register_csv(const RedistRegister& reg, const Array2<State>& dF_cell, const Array2<State>& dRbold,
                        std::ostream& os) {
  os << "I,J,component,dR_coarse,dR_fine,dF,dRbold\n";
  if (reg.covered.empty()) return;
  os.precision(17);
  for_each_cell(reg.window, [&](int i, int j) {
    const State f = dF_cell.box().contains(i, j) ? dF_cell(i, j) : State{};
    const State b = dRbold.box().contains(i, j) ? dRbold(i, j) : State{};
    if (reg.dR_coarse(i, j) == State{} && reg.dR_fine(i, j) == State{} && f == State{} && b == State{}) return;
    for (int k = 0; k < kNcomp; ++k) {
      os << i << ',' << j << ',' << k << ',' << reg.dR_coarse(i, j)[k] << ',' << reg.dR_fine(i, j)[k] << ','
         << f[k] << ',' << b[k] << '\n';
    }
  });
}

}  // namespace ebamr
