#include "ebamr/wsrd.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "ebamr/frd.hpp"

namespace ebamr {

namespace {

bool contains(const std::vector<IntVect>& v, IntVect q) { return std::find(v.begin(), v.end(), q) != v.end(); }

std::vector<IntVect> normal_members(const LevelGeometry& geom, int i, int j) {
  const IntVect p{i, j};
  const double target = geom.v_target();
  const std::vector<IntVect> reach = monotone_path_neighbors(geom, i, j);
  std::vector<IntVect> m{p};
  double vol = geom.volume(i, j);
  auto add = [&](IntVect q) {
    if (contains(reach, q) && !contains(m, q)) {
      m.push_back(q);
      vol += geom.volume(q.i, q.j);
    }
  };
  const auto n = geom.eb_normal(i, j);
  if (n[0] != 0.0 || n[1] != 0.0) {
    const int d0 = std::abs(n[0]) >= std::abs(n[1]) ? 0 : 1, d1 = 1 - d0;
    const int s0 = n[d0] >= 0.0 ? 1 : -1;
    add(p + IntVect{s0 * unit(d0).i, s0 * unit(d0).j});
    if (vol < target) {
      int s1 = n[d1] > 0.0 ? 1 : (n[d1] < 0.0 ? -1 : 0);
      if (s1 == 0) {
        // No preference from the normal: take the side with more fluid.
        const IntVect a = p + unit(d1), b = p - unit(d1);
        const double va = contains(reach, a) ? geom.volume(a.i, a.j) : -1.0;
        const double vb = contains(reach, b) ? geom.volume(b.i, b.j) : -1.0;
        s1 = va >= vb ? 1 : -1;
      }
      add(p + IntVect{s1 * unit(d1).i, s1 * unit(d1).j});
      add(p + IntVect{s0 * unit(d0).i + s1 * unit(d1).i, s0 * unit(d0).j + s1 * unit(d1).j});
    }
  }
  if (vol < target) {
    for (const auto& q : reach) add(q);
  }
  return m;
}

}  // namespace

NeighborhoodMap build_neighborhoods(const LevelGeometry& geom, MergeStrategy strategy) {
  const Box& dom = geom.domain();
  NeighborhoodMap nb;
  nb.strategy = strategy;
  nb.members = CellLists(dom);
  nb.N = Array2<int>(dom, 0);
  std::vector<std::vector<IntVect>> own(dom.num_cells());
  auto lin = [&](IntVect q) { return static_cast<std::size_t>(q.j - dom.lo.j) * dom.length(0) + (q.i - dom.lo.i); };
  for_each_cell(dom, [&](int i, int j) {
    nb.members.begin(i, j);
    if (geom.is_fluid(i, j)) {
      std::vector<IntVect> m;
      if (geom.volume(i, j) >= geom.v_target()) {
        m = {IntVect{i, j}};
      } else if (strategy == MergeStrategy::central) {
        m = monotone_path_neighbors(geom, i, j);
      } else {
        m = normal_members(geom, i, j);
      }
      double vol = 0.0;
      for (const auto& q : m) vol += geom.volume(q.i, q.j);
      if (vol < geom.v_target()) {
        std::ostringstream os;
        os << "merging neighborhood of cell (" << i << "," << j << ") reaches only " << vol / geom.cell_volume()
           << " of a cell volume";
        throw SolverError(SolverError::Kind::InsufficientVolume, os.str()).at_cell({i, j});
      }
      for (const auto& q : m) {
        nb.members.push(q);
        own[lin(q)].push_back({i, j});
      }
    }
    nb.members.end(i, j);
  });
  nb.owners = CellLists(dom);
  for_each_cell(dom, [&](int i, int j) {
    nb.owners.begin(i, j);
    auto& o = own[lin({i, j})];
    // The cell's own neighborhood first, then the others in row-major order.
    std::stable_sort(o.begin(), o.end(), [&](IntVect a, IntVect b) {
      const bool sa = a == IntVect{i, j}, sb = b == IntVect{i, j};
      if (sa != sb) return sa;
      return lin(a) < lin(b);
    });
    for (const auto& q : o) nb.owners.push(q);
    nb.owners.end(i, j);
    nb.N(i, j) = static_cast<int>(o.size());
  });
  return nb;
}

Weights compute_weights(const LevelGeometry& geom, const NeighborhoodMap& nb) {
  const Box& dom = geom.domain();
  Weights w{Array2<double>(dom, 0.0), Array2<double>(dom, 0.0)};
  for_each_cell(dom, [&](int i, int j) {
    if (!geom.is_fluid(i, j)) return;
    const double v = geom.volume(i, j);
    if (v >= geom.v_target()) return;
    double others = 0.0;
    for (const auto& q : nb.members(i, j)) {
      if (q != IntVect{i, j}) others += geom.volume(q.i, q.j);
    }
    w.beta(i, j) = (geom.v_target() - v) / others;
  });
  for_each_cell(dom, [&](int i, int j) {
    if (!geom.is_fluid(i, j)) return;
    double s = 0.0;
    for (const auto& r : nb.owners(i, j)) {
      if (r != IntVect{i, j}) s += w.beta(r);
    }
    w.alpha(i, j) = 1.0 - s / nb.N(i, j);
  });
  return w;
}

MergeMatrix assemble_merge_matrix(const LevelGeometry& geom, const NeighborhoodMap& nb, const Weights& w) {
  const Box& dom = geom.domain();
  MergeMatrix A;
  A.rows = CellLists(dom);
  A.cols = CellLists(dom);
  A.vhat = Array2<double>(dom, 0.0);
  A.xhat = Array2<std::array<double, 2>>(dom, {0.0, 0.0});
  for_each_cell(dom, [&](int i, int j) {
    A.rows.begin(i, j);
    if (geom.is_fluid(i, j)) {
      double vh = 0.0, mx = 0.0, my = 0.0;
      for (const auto& q : nb.members(i, j)) {
        const double a = q == IntVect{i, j} ? w.alpha(i, j) : w.beta(i, j) / nb.N(q);
        A.rows.push(q, a);
        const double v = a * geom.volume(q.i, q.j);
        const Point x = geom.cell_centroid(q.i, q.j);
        vh += v;
        mx += v * x.x;
        my += v * x.y;
      }
      A.vhat(i, j) = vh;
      A.xhat(i, j) = {mx / vh, my / vh};
    }
    A.rows.end(i, j);
  });
  for_each_cell(dom, [&](int i, int j) {
    A.cols.begin(i, j);
    for (const auto& r : nb.owners(i, j)) {
      A.cols.push(r, r == IntVect{i, j} ? w.alpha(i, j) : w.beta(r) / nb.N(i, j));
    }
    A.cols.end(i, j);
  });
  return A;
}

WsrdOperator make_wsrd(const LevelGeometry& geom, MergeStrategy strategy) {
  WsrdOperator op;
  op.nb = build_neighborhoods(geom, strategy);
  op.w = compute_weights(geom, op.nb);
  op.A = assemble_merge_matrix(geom, op.nb, op.w);
  return op;
}

Array2<State> neighborhood_averages(const Array2<State>& Uhat, const LevelGeometry& geom, const MergeMatrix& A,
                                    const Box& region) {
  Array2<State> Q(Uhat.box(), State{});
  for_each_cell(region.intersect(geom.domain()), [&](int i, int j) {
    if (!geom.is_fluid(i, j)) return;
    const auto cells = A.rows(i, j);
    const auto vals = A.rows.values(i, j);
    if (cells.size() == 1) {
      Q(i, j) = Uhat(i, j);
      return;
    }
    State s{};
    for (std::size_t k = 0; k < cells.size(); ++k) s += (vals[k] * geom.volume(cells[k].i, cells[k].j)) * Uhat(cells[k]);
    Q(i, j) = (1.0 / A.vhat(i, j)) * s;
  });
  return Q;
}

std::array<Array2<State>, 2> neighborhood_gradients(const Array2<State>& Qhat, const LevelGeometry& geom,
                                                    const MergeMatrix& A, const Box& region, const Box& qvalid,
                                                    bool limit) {
  std::array<Array2<State>, 2> g{Array2<State>(Qhat.box(), State{}), Array2<State>(Qhat.box(), State{})};
  const Box avail = qvalid.intersect(geom.domain());
  const double hx = geom.dx(), hy = geom.dy();
  struct Pt {
    double dx, dy;
    IntVect c;
  };
  std::vector<Pt> pts;
  for_each_cell(region.intersect(geom.domain()), [&](int i, int j) {
    if (!geom.is_fluid(i, j) || A.rows.count(i, j) < 2) return;
    const auto xr = A.xhat(i, j);
    auto gather = [&](int wx, int wy) {
      pts.clear();
      for (int jj = j - wy; jj <= j + wy; ++jj) {
        for (int ii = i - wx; ii <= i + wx; ++ii) {
          if ((ii == i && jj == j) || !avail.contains(ii, jj) || !geom.is_fluid(ii, jj)) continue;
          const auto xs = A.xhat(ii, jj);
          pts.push_back({xs[0] - xr[0], xs[1] - xr[1], {ii, jj}});
        }
      }
    };
    auto spread = [&](int d) {
      double m = 0.0;
      for (const auto& p : pts) m = std::max(m, std::abs(d == 0 ? p.dx : p.dy));
      return m;
    };
    gather(1, 1);
    int wx = spread(0) < 0.5 * hx ? 2 : 1;
    int wy = spread(1) < 0.5 * hy ? 2 : 1;
    if (wx == 2 || wy == 2) gather(wx, wy);
    const bool okx = spread(0) >= 0.5 * hx, oky = spread(1) >= 0.5 * hy;
    if (!okx && !oky) return;
    double sxx = 0, sxy = 0, syy = 0;
    for (const auto& p : pts) {
      sxx += p.dx * p.dx;
      sxy += p.dx * p.dy;
      syy += p.dy * p.dy;
    }
    const double det = sxx * syy - sxy * sxy;
    const bool two_d = okx && oky && det > 1e-10 * sxx * syy;
    if (okx && oky && !two_d) return;
    State gx{}, gy{};
    const State& q0 = Qhat(i, j);
    for (int k = 0; k < kNcomp; ++k) {
      double bx = 0, by = 0;
      for (const auto& p : pts) {
        const double dq = Qhat(p.c)[k] - q0[k];
        bx += p.dx * dq;
        by += p.dy * dq;
      }
      if (two_d) {
        gx[k] = (syy * bx - sxy * by) / det;
        gy[k] = (sxx * by - sxy * bx) / det;
      } else if (okx) {
        gx[k] = bx / sxx;
      } else {
        gy[k] = by / syy;
      }
    }
    if (limit) {
      const auto cells = A.rows(i, j);
      for (int k = 0; k < kNcomp; ++k) {
        double qmin = q0[k], qmax = q0[k];
        for (const auto& p : pts) {
          qmin = std::min(qmin, Qhat(p.c)[k]);
          qmax = std::max(qmax, Qhat(p.c)[k]);
        }
        double phi = 1.0;
        for (const auto& c : cells) {
          const Point x = geom.cell_centroid(c.i, c.j);
          const double d = gx[k] * (x.x - xr[0]) + gy[k] * (x.y - xr[1]);
          if (d > 0.0) phi = std::min(phi, (qmax - q0[k]) / d);
          if (d < 0.0) phi = std::min(phi, (qmin - q0[k]) / d);
        }
        phi = std::max(phi, 0.0);
        gx[k] *= phi;
        gy[k] *= phi;
      }
    }
    g[0](i, j) = gx;
    g[1](i, j) = gy;
  });
  return g;
}

Array2<State> apply_wsrd(const Array2<State>& Uhat, const LevelGeometry& geom, const MergeMatrix& A,
                         const Array2<State>& Qhat, const std::array<Array2<State>, 2>& grad, const Box& region) {
  Array2<State> U = Uhat;
  for_each_cell(region.intersect(geom.domain()), [&](int i, int j) {
    if (!geom.is_fluid(i, j)) return;
    const Point x = geom.cell_centroid(i, j);
    const auto owners = A.cols(i, j);
    const auto vals = A.cols.values(i, j);
    State s{};
    for (std::size_t k = 0; k < owners.size(); ++k) {
      const IntVect r = owners[k];
      const auto xr = A.xhat(r);
      State q = Qhat(r);
      q += (x.x - xr[0]) * grad[0](r);
      q += (x.y - xr[1]) * grad[1](r);
      s += vals[k] * q;
    }
    U(i, j) = s;
  });
  return U;
}

void scale_for_positivity(std::array<Array2<State>, 2>& grad, const Array2<State>& Qhat, const LevelGeometry& geom,
                          const MergeMatrix& A, const Box& region, const Gas& gas) {
  for_each_cell(region.intersect(geom.domain()), [&](int i, int j) {
    if (!geom.is_fluid(i, j) || A.rows.count(i, j) < 2) return;
    const State gx = grad[0](i, j), gy = grad[1](i, j);
    if (gx == State{} && gy == State{}) return;
    const State q = Qhat(i, j);
    const auto xr = A.xhat(i, j);
    const auto members = A.rows(i, j);
    auto ok = [&](double th) {
      for (const auto& m : members) {
        const Point x = geom.cell_centroid(m.i, m.j);
        if (!valid_state(q + (th * (x.x - xr[0])) * gx + (th * (x.y - xr[1])) * gy, gas)) return false;
      }
      return true;
    };
    if (ok(1.0)) return;
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 30; ++it) {
      const double mid = 0.5 * (lo + hi);
      (ok(mid) ? lo : hi) = mid;
    }
    grad[0](i, j) = lo * gx;
    grad[1](i, j) = lo * gy;
  });
}

WsrdResult redistribute(const Array2<State>& Uhat, const LevelGeometry& geom, const WsrdOperator& op,
                        const Box& region, const WsrdOptions& opt) {
  WsrdResult r;
  const Box qregion = region.grow(3);
  r.Qhat = neighborhood_averages(Uhat, geom, op.A, qregion);
  if (opt.gradients) {
    r.grad = neighborhood_gradients(r.Qhat, geom, op.A, region.grow(1), qregion, opt.limit);
    if (opt.limit) scale_for_positivity(r.grad, r.Qhat, geom, op.A, region.grow(1), Gas{opt.gamma});
  } else {
    r.grad = {Array2<State>(Uhat.box(), State{}), Array2<State>(Uhat.box(), State{})};
  }
  r.U = apply_wsrd(Uhat, geom, op.A, r.Qhat, r.grad, region);
  return r;
}

void write_merge_matrix_csv(const MergeMatrix& A, std::ostream& os) {
  const Box& dom = A.rows.domain();
  auto lin = [&](IntVect q) { return static_cast<long>(q.j - dom.lo.j) * dom.length(0) + (q.i - dom.lo.i); };
  os << "row,col,value\n";
  os.precision(17);
  for_each_cell(dom, [&](int i, int j) {
    const auto cells = A.rows(i, j);
    const auto vals = A.rows.values(i, j);
    for (std::size_t k = 0; k < cells.size(); ++k) os << lin({i, j}) << ',' << lin(cells[k]) << ',' << vals[k] << '\n';
  });
}

}  // namespace ebamr
