#include "ebamr/frd.hpp"

namespace ebamr {

std::vector<IntVect> monotone_path_neighbors(const LevelGeometry& geom, int i, int j) {
  std::vector<IntVect> out;
  const Box& dom = geom.domain();
  if (!geom.is_fluid(i, j)) return out;
  out.push_back({i, j});
  // Step from a to a + s e_d across the shared face.
  auto step_ok = [&](IntVect a, int d, int s) {
    const IntVect b = a + IntVect{s * unit(d).i, s * unit(d).j};
    if (!dom.contains(b) || !geom.is_fluid(b.i, b.j)) return false;
    const IntVect f = s > 0 ? b : a;
    return geom.area_frac(d, f.i, f.j) > 0.0;
  };
  for (int dj = -1; dj <= 1; ++dj) {
    for (int di = -1; di <= 1; ++di) {
      if (di == 0 && dj == 0) continue;
      const IntVect p{i, j};
      bool ok = false;
      if (dj == 0) {
        ok = step_ok(p, 0, di);
      } else if (di == 0) {
        ok = step_ok(p, 1, dj);
      } else {
        ok = (step_ok(p, 0, di) && step_ok(p + IntVect{di, 0}, 1, dj)) ||
             (step_ok(p, 1, dj) && step_ok(p + IntVect{0, dj}, 0, di));
      }
      if (ok) out.push_back({i + di, j + dj});
    }
  }
  return out;
}

FrdNeighborhoods::FrdNeighborhoods(const LevelGeometry& geom)
    : domain_(geom.domain()), index_(geom.domain(), -1), vol_(geom.domain(), 0.0) {
  for_each_cell(domain_, [&](int i, int j) {
    if (!geom.is_fluid(i, j)) return;
    index_(i, j) = static_cast<int>(sets_.size());
    sets_.push_back(monotone_path_neighbors(geom, i, j));
    double v = 0.0;
    for (const auto& q : sets_.back()) v += geom.volume(q.i, q.j);
    vol_(i, j) = v;
  });
  sets_.emplace_back();  // empty set for body cells
  for (auto& k : index_.data()) {
    if (k < 0) k = static_cast<int>(sets_.size()) - 1;
  }
}

FrdNeighborhoods build_frd_neighborhoods(const LevelGeometry& geom) { return FrdNeighborhoods(geom); }

Array2<State> nonconservative_update(const Array2<State>& dUc, const LevelGeometry& geom,
                                     const FrdNeighborhoods& nbhd, const Box& region) {
  Array2<State> out(dUc.box(), State{});
  for_each_cell(region.intersect(nbhd.domain()), [&](int i, int j) {
    if (!geom.is_cut(i, j)) return;
    State s{};
    double w = 0.0;
    for (const auto& q : nbhd(i, j)) {
      const double l = geom.vol_frac(q.i, q.j);
      s += l * dUc(q);
      w += l;
    }
    out(i, j) = (1.0 / w) * s;
  });
  return out;
}

FrdResult frd_apply(const Array2<State>& dUc, const LevelGeometry& geom, const FrdNeighborhoods& nbhd,
                    const Box& sources, const ConsField* density_weights) {
  FrdResult r;
  r.dU = dUc;
  const Box src = sources.intersect(nbhd.domain());
  const Array2<State> dUnc = nonconservative_update(dUc, geom, nbhd, src);
  for_each_cell(src, [&](int i, int j) {
    if (!geom.is_cut(i, j)) return;
    const double l = geom.vol_frac(i, j);
    r.dU(i, j) = l * dUc(i, j) + (1.0 - l) * dUnc(i, j);
  });
  for_each_cell(src, [&](int i, int j) {
    if (!geom.is_cut(i, j)) return;
    const double l = geom.vol_frac(i, j);
    const State dM = (geom.volume(i, j) * (1.0 - l)) * (dUc(i, j) - dUnc(i, j));
    const auto& members = nbhd(i, j);
    double total = 0.0;
    for (const auto& q : members) {
      total += geom.volume(q.i, q.j) * (density_weights ? (*density_weights)(q)[0] : 1.0);
    }
    for (const auto& q : members) {
      const double vq = geom.volume(q.i, q.j);
      const double share = vq * (density_weights ? (*density_weights)(q)[0] : 1.0) / total;
      const State amount = share * dM;
      r.dU(q) += (1.0 / vq) * amount;
      r.transfers.push_back({{i, j}, q, amount});
    }
  });
  return r;
}

}  // namespace ebamr
