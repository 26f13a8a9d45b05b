#include "ebamr/sync.hpp"

#include <cmath>

namespace ebamr {

FluxRegister::FluxRegister(const Box& cov, const Box& dom) : covered(cov), domain(dom) {
  if (covered.empty()) return;
  const Box w = covered.grow(1);
  dF = {Array2<State>(w.faces(0), State{}), Array2<State>(w.faces(1), State{})};
}

void FluxRegister::reset() {
  for (auto& a : dF) a.fill(State{});
  cf_mass = 0.0;
}

bool FluxRegister::is_cf_face(int d, int i, int j) const {
  const IntVect hi{i, j}, lo = hi - unit(d);
  if (!domain.contains(lo) || !domain.contains(hi)) return false;
  return covered.contains(lo) != covered.contains(hi);
}

int FluxRegister::orientation(int d, int i, int j) const { return covered.contains(IntVect{i, j} - unit(d)) ? 1 : -1; }

IntVect FluxRegister::uncovered_cell(int d, int i, int j) const {
  return orientation(d, i, j) > 0 ? IntVect{i, j} : IntVect{i, j} - unit(d);
}

void accumulate_coarse(FluxRegister& reg, const FaceFluxes& F, const LevelGeometry& coarse, double scale) {
  if (reg.covered.empty()) return;
  for (int d = 0; d < 2; ++d) {
    for_each_cell(reg.dF[d].box(), [&](int i, int j) {
      if (!reg.is_cf_face(d, i, j)) return;
      const double a = coarse.face_area(d, i, j);
      if (a <= 0.0) return;
      reg.dF[d](i, j) -= (reg.orientation(d, i, j) * scale * a) * F.f[d](i, j);
    });
  }
}

void accumulate_fine(FluxRegister& reg, const FaceFluxes& F, const LevelGeometry& fine, double scale) {
  if (reg.covered.empty()) return;
  for (int d = 0; d < 2; ++d) {
    const IntVect et = unit(1 - d);
    for_each_cell(reg.dF[d].box(), [&](int i, int j) {
      if (!reg.is_cf_face(d, i, j)) return;
      State s{};
      const IntVect f0{2 * i, 2 * j};
      for (int k = 0; k < 2; ++k) {
        const IntVect f = f0 + IntVect{k * et.i, k * et.j};
        const double a = fine.face_area(d, f.i, f.j);
        if (a > 0.0) s += a * F.f[d](f);
      }
      s = scale * s;
      reg.cf_mass += std::abs(s[0]);
      reg.dF[d](i, j) += static_cast<double>(reg.orientation(d, i, j)) * s;
    });
  }
}

Array2<State> reflux_by_cell(const FluxRegister& reg) {
  if (reg.covered.empty()) return {};
  Array2<State> out(reg.covered.grow(1), State{});
  for (int d = 0; d < 2; ++d) {
    for_each_cell(reg.dF[d].box(), [&](int i, int j) {
      if (!reg.is_cf_face(d, i, j)) return;
      out(reg.uncovered_cell(d, i, j)) += reg.dF[d](i, j);
    });
  }
  return out;
}

}  // namespace ebamr
