#include <cmath>
#include <map>
#include <random>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "ebamr/frd.hpp"
#include "ebamr/wsrd.hpp"

using namespace ebamr;

namespace {

LevelGeometry unit_grid(int nx, int ny) {
  return build_geometry(ImplicitFunction::all_fluid(), Box({0, 0}, {nx - 1, ny - 1}), 1.0, 1.0);
}

LevelGeometry random_circle(std::mt19937& rng, int n) {
  std::uniform_real_distribution<double> c(0.35, 0.65), r(0.12, 0.3);
  const double h = 1.0 / n;
  return build_geometry(ImplicitFunction::circle({c(rng), c(rng)}, r(rng), FluidSide::outside),
                        Box({0, 0}, {n - 1, n - 1}), h, h);
}

Array2<State> random_field(std::mt19937& rng, const LevelGeometry& g) {
  std::uniform_real_distribution<double> u(0.5, 2.0);
  Array2<State> U(g.box(), State{1, 1, 1, 1});
  for_each_cell(g.domain(), [&](int i, int j) { U(i, j) = {u(rng), u(rng) - 1.25, u(rng) - 1.25, u(rng) + 2}; });
  return U;
}

// Dense matrices over the fluid cells of the domain.
struct Dense {
  std::vector<IntVect> cells;
  std::map<std::pair<int, int>, int> idx;
  std::vector<std::vector<double>> A;  // A[R][I]
};

Dense dense_from(const LevelGeometry& g, const MergeMatrix& M) {
  Dense d;
  for_each_cell(g.domain(), [&](int i, int j) {
    if (!g.is_fluid(i, j)) return;
    d.idx[{i, j}] = static_cast<int>(d.cells.size());
    d.cells.push_back({i, j});
  });
  const std::size_t n = d.cells.size();
  d.A.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t r = 0; r < n; ++r) {
    const auto c = d.cells[r];
    const auto cs = M.rows(c.i, c.j);
    const auto vs = M.rows.values(c.i, c.j);
    for (std::size_t k = 0; k < cs.size(); ++k) d.A[r][d.idx[{cs[k].i, cs[k].j}]] = vs[k];
  }
  return d;
}

}  // namespace

TEST_CASE("all-regular mesh: trivial neighborhoods and identity operator") {
  const auto g = unit_grid(6, 5);
  const auto op = make_wsrd(g, MergeStrategy::normal);
  for_each_cell(g.domain(), [&](int i, int j) {
    CHECK(op.nb.members.count(i, j) == 1);
    CHECK(op.nb.N(i, j) == 1);
    CHECK(op.w.alpha(i, j) == 1.0);
    CHECK(op.w.beta(i, j) == 0.0);
    CHECK(op.A.rows.values(i, j)[0] == 1.0);
  });
  std::mt19937 rng(3);
  const auto U = random_field(rng, g);
  const auto out = redistribute(U, g, op, g.domain());
  for_each_cell(g.domain(), [&](int i, int j) { CHECK(out.U(i, j) == U(i, j)); });
}

TEST_CASE("normal merging with a single regular neighbor: hand-evaluated weights") {
  auto g = unit_grid(5, 5);
  g.volfrac_array()(2, 2) = 0.1;
  g.areafrac_array(0)(2, 2) = 0.0;  // wall on the low-x side: normal points +x
  g.finalize_boundary(g.box());
  const auto op = make_wsrd(g, MergeStrategy::normal);
  const auto m = op.nb.members(2, 2);
  REQUIRE(m.size() == 2);
  CHECK(m[1] == IntVect{3, 2});
  CHECK(op.w.beta(2, 2) == doctest::Approx(0.4));
  CHECK(op.w.alpha(2, 2) == 1.0);
  CHECK(op.nb.N(3, 2) == 2);
  CHECK(op.w.alpha(3, 2) == doctest::Approx(0.8));
  CHECK(op.A.vhat(2, 2) == doctest::Approx(0.3));
  CHECK(op.A.vhat(3, 2) == doctest::Approx(0.8));

  Array2<State> U(g.box(), State{1, 1, 1, 1});
  U(2, 2) = {10, 10, 10, 10};
  const auto out = redistribute(U, g, op, g.domain(), {.gradients = false});
  CHECK(out.Qhat(2, 2)[0] == doctest::Approx(4.0));
  CHECK(out.Qhat(3, 2)[0] == doctest::Approx(1.0));
  CHECK(out.U(2, 2)[0] == doctest::Approx(4.0));
  CHECK(out.U(3, 2)[0] == doctest::Approx(1.6));
}

TEST_CASE("diagonal normal with small axis neighbors builds a 2x2 neighborhood") {
  auto g = unit_grid(6, 6);
  g.volfrac_array()(2, 2) = 0.05;
  g.areafrac_array(0)(2, 2) = 0.0;
  g.areafrac_array(1)(2, 2) = 0.0;
  g.volfrac_array()(3, 2) = 0.1;
  g.volfrac_array()(2, 3) = 0.1;
  g.finalize_boundary(g.box());
  const auto nb = build_neighborhoods(g, MergeStrategy::normal);
  const auto m = nb.members(2, 2);
  REQUIRE(m.size() == 4);
  CHECK(m[1] == IntVect{3, 2});
  CHECK(m[2] == IntVect{2, 3});
  CHECK(m[3] == IntVect{3, 3});
  const auto c = build_neighborhoods(g, MergeStrategy::central);
  // (1,1), (1,2), (2,1) are only reachable through the closed faces.
  CHECK(c.members(2, 2).size() == 6);
}

TEST_CASE("merge matrix identities on randomized cut meshes") {
  std::mt19937 rng(12345);
  for (int trial = 0; trial < 12; ++trial) {
    const auto g = random_circle(rng, trial % 2 ? 10 : 32);
    for (auto strat : {MergeStrategy::normal, MergeStrategy::central}) {
      const auto op = make_wsrd(g, strat);
      std::map<std::pair<int, int>, double> colsum;
      for_each_cell(g.domain(), [&](int i, int j) {
        if (!g.is_fluid(i, j)) return;
        CHECK(op.w.alpha(i, j) >= 0.0);
        CHECK(op.w.alpha(i, j) <= 1.0);
        CHECK(op.w.beta(i, j) >= 0.0);
        CHECK(op.w.beta(i, j) <= 1.0);
        double vol = 0.0, vh = 0.0;
        const auto cs = op.A.rows(i, j);
        const auto vs = op.A.rows.values(i, j);
        CHECK(cs[0] == IntVect{i, j});
        for (std::size_t k = 0; k < cs.size(); ++k) {
          CHECK(vs[k] > 0.0);
          colsum[{cs[k].i, cs[k].j}] += vs[k];
          vol += g.volume(cs[k].i, cs[k].j);
          vh += vs[k] * g.volume(cs[k].i, cs[k].j);
        }
        CHECK(vol >= g.v_target() * (1 - 1e-14));
        CHECK(std::abs(vh - op.A.vhat(i, j)) <= 1e-14 * g.cell_volume());
        if (op.nb.N(i, j) == 1) CHECK(op.w.alpha(i, j) == 1.0);
        if (g.volume(i, j) >= g.v_target()) CHECK(cs.size() == 1);
      });
      for (const auto& [c, s] : colsum) CHECK(std::abs(s - 1.0) <= 1e-14);
    }
  }
}

TEST_CASE("matrix-free redistribution agrees with dense evaluation") {
  std::mt19937 rng(99);
  for (int trial = 0; trial < 6; ++trial) {
    const auto g = random_circle(rng, 10);
    const auto op = make_wsrd(g, trial % 2 ? MergeStrategy::central : MergeStrategy::normal);
    const auto U = random_field(rng, g);
    const Dense d = dense_from(g, op.A);
    const std::size_t n = d.cells.size();
    for (bool grads : {false, true}) {
      const auto out = redistribute(U, g, op, g.domain(), {.gradients = grads});
      // Qhat = Diag(Vhat)^-1 A Diag(V) Uhat, then U = A^T Qhat + [Diag(x) A^T - A^T Diag(xhat)] sigma.
      std::vector<double> vhat(n, 0.0);
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) vhat[r] += d.A[r][c] * g.volume(d.cells[c].i, d.cells[c].j);
      for (int k = 0; k < kNcomp; ++k) {
        std::vector<double> q(n, 0.0);
        for (std::size_t r = 0; r < n; ++r) {
          for (std::size_t c = 0; c < n; ++c) q[r] += d.A[r][c] * g.volume(d.cells[c].i, d.cells[c].j) * U(d.cells[c])[k];
          q[r] /= vhat[r];
        }
        for (std::size_t c = 0; c < n; ++c) {
          const Point x = g.cell_centroid(d.cells[c].i, d.cells[c].j);
          double u = 0.0;
          for (std::size_t r = 0; r < n; ++r) {
            const IntVect R = d.cells[r];
            const auto xh = op.A.xhat(R);
            u += d.A[r][c] * (q[r] + (x.x - xh[0]) * out.grad[0](R)[k] + (x.y - xh[1]) * out.grad[1](R)[k]);
          }
          CHECK(std::abs(u - out.U(d.cells[c])[k]) <= 1e-13 * std::max(1.0, std::abs(u)));
        }
      }
    }
  }
}

TEST_CASE("redistribution conserves and preserves linear data") {
  std::mt19937 rng(2024);
  for (int trial = 0; trial < 6; ++trial) {
    const auto g = random_circle(rng, 24);
    const auto op = make_wsrd(g, trial % 2 ? MergeStrategy::central : MergeStrategy::normal);
    const auto U = random_field(rng, g);
    for (bool grads : {false, true}) {
      const auto out = redistribute(U, g, op, g.domain(), {.gradients = grads});
      State before{}, after{};
      State lo{1e300, 1e300, 1e300, 1e300}, hi{-1e300, -1e300, -1e300, -1e300};
      for_each_cell(g.domain(), [&](int i, int j) {
        if (!g.is_fluid(i, j)) return;
        before += g.volume(i, j) * U(i, j);
        after += g.volume(i, j) * out.U(i, j);
        for (int k = 0; k < 4; ++k) {
          lo[k] = std::min(lo[k], U(i, j)[k]);
          hi[k] = std::max(hi[k], U(i, j)[k]);
        }
      });
      for (int k = 0; k < 4; ++k) CHECK(std::abs(after[k] - before[k]) <= 1e-13 * std::abs(before[k]));
      if (!grads) {
        for_each_cell(g.domain(), [&](int i, int j) {
          if (!g.is_fluid(i, j)) return;
          for (int k = 0; k < 4; ++k) {
            CHECK(out.U(i, j)[k] >= lo[k] - 1e-14);
            CHECK(out.U(i, j)[k] <= hi[k] + 1e-14);
          }
        });
      }
    }
    // Linear data in centroids is reproduced when the limiter is off.
    Array2<State> L(g.box(), State{});
    for_each_cell(g.box(), [&](int i, int j) {
      const Point x = g.cell_centroid(i, j);
      L(i, j) = {1.0 + 2.0 * x.x - 3.0 * x.y, 0.5 * x.x, -x.y, 4.0 + x.x + x.y};
    });
    const auto lin = redistribute(L, g, op, g.domain(), {.gradients = true, .limit = false});
    for_each_cell(g.domain(), [&](int i, int j) {
      if (!g.is_fluid(i, j)) return;
      for (int k = 0; k < 4; ++k) CHECK(std::abs(lin.U(i, j)[k] - L(i, j)[k]) <= 1e-12);
    });
  }
}

TEST_CASE("neighborhood gradients: exact on linear data, degenerate rows, limiter bounds") {
  std::mt19937 rng(5);
  const auto g = random_circle(rng, 20);
  const auto op = make_wsrd(g, MergeStrategy::normal);
  Array2<State> Q(g.box(), State{});
  for_each_cell(g.domain(), [&](int i, int j) {
    if (!g.is_fluid(i, j)) return;
    const auto x = op.A.xhat(i, j);
    Q(i, j) = {3.0 - x[0] + 2.0 * x[1], 0, 0, 0};
  });
  const auto grad = neighborhood_gradients(Q, g, op.A, g.domain(), g.domain(), false);
  int checked = 0;
  for_each_cell(g.domain(), [&](int i, int j) {
    if (!g.is_fluid(i, j) || op.A.rows.count(i, j) < 2) return;
    ++checked;
    CHECK(grad[0](i, j)[0] == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(grad[1](i, j)[0] == doctest::Approx(2.0).epsilon(1e-12));
  });
  CHECK(checked > 0);

  // A single row of cells: no separation in y even after widening.
  auto row = unit_grid(8, 1);
  row.volfrac_array()(3, 0) = 0.2;
  row.areafrac_array(0)(3, 0) = 0.0;
  row.finalize_boundary(row.box());
  const auto rop = make_wsrd(row, MergeStrategy::normal);
  Array2<State> Qr(row.box(), State{});
  for_each_cell(row.domain(), [&](int i, int j) { Qr(i, j) = {static_cast<double>(i * i), 0, 0, 0}; });
  const auto gr = neighborhood_gradients(Qr, row, rop.A, row.domain(), row.domain(), false);
  CHECK(gr[1](3, 0)[0] == 0.0);
  CHECK(gr[0](3, 0)[0] != 0.0);

  // Spike at the center: limited reconstruction stays within the stencil range.
  Array2<State> S(g.box(), State{});
  for_each_cell(g.domain(), [&](int i, int j) {
    const auto x = op.A.xhat(i, j);
    S(i, j) = {x[0] * 5.0 + ((i + j) % 3 == 0 ? 4.0 : 0.0), 0, 0, 0};
  });
  const auto gl = neighborhood_gradients(S, g, op.A, g.domain(), g.domain(), true);
  for_each_cell(g.domain(), [&](int i, int j) {
    if (!g.is_fluid(i, j) || op.A.rows.count(i, j) < 2) return;
    double lo = S(i, j)[0], hi = lo;
    for (int jj = j - 2; jj <= j + 2; ++jj)
      for (int ii = i - 2; ii <= i + 2; ++ii)
        if (g.domain().contains(ii, jj) && g.is_fluid(ii, jj)) {
          lo = std::min(lo, S(ii, jj)[0]);
          hi = std::max(hi, S(ii, jj)[0]);
        }
    const auto xr = op.A.xhat(i, j);
    for (const auto& c : op.A.rows(i, j)) {
      const Point x = g.cell_centroid(c.i, c.j);
      const double v = S(i, j)[0] + gl[0](i, j)[0] * (x.x - xr[0]) + gl[1](i, j)[0] * (x.y - xr[1]);
      CHECK(v >= lo - 1e-12);
      CHECK(v <= hi + 1e-12);
    }
  });
}

TEST_CASE("merge matrix CSV triplets") {
  auto g = unit_grid(5, 5);
  g.volfrac_array()(2, 2) = 0.1;
  g.areafrac_array(0)(2, 2) = 0.0;
  g.finalize_boundary(g.box());
  const auto op = make_wsrd(g, MergeStrategy::normal);
  std::ostringstream os;
  write_merge_matrix_csv(op.A, os);
  CHECK(os.str().rfind("row,col,value\n", 0) == 0);
  CHECK(os.str().find("\n12,13,") != std::string::npos);
}

TEST_CASE("monotone-path neighborhoods") {
  auto g = unit_grid(5, 5);
  CHECK(monotone_path_neighbors(g, 2, 2).size() == 9);
  // L-shaped body: (3,2) and (2,3) solid block both paths to the diagonal (3,3).
  g.volfrac_array()(3, 2) = 0.0;
  g.volfrac_array()(2, 3) = 0.0;
  for (auto c : {IntVect{3, 2}, IntVect{2, 3}}) {
    g.areafrac_array(0)(c.i, c.j) = g.areafrac_array(0)(c.i + 1, c.j) = 0.0;
    g.areafrac_array(1)(c.i, c.j) = g.areafrac_array(1)(c.i, c.j + 1) = 0.0;
  }
  g.finalize_boundary(g.box());
  const auto m = monotone_path_neighbors(g, 2, 2);
  CHECK(m.size() == 6);
  CHECK(std::find(m.begin(), m.end(), IntVect{3, 3}) == m.end());
  // Isolated cell.
  auto iso = unit_grid(3, 3);
  iso.volfrac_array()(1, 1) = 0.3;
  iso.areafrac_array(0)(1, 1) = iso.areafrac_array(0)(2, 1) = 0.0;
  iso.areafrac_array(1)(1, 1) = iso.areafrac_array(1)(1, 2) = 0.0;
  iso.finalize_boundary(iso.box());
  CHECK(monotone_path_neighbors(iso, 1, 1).size() == 1);
}

TEST_CASE("flux redistribution: hand values and conservation") {
  // Two-cell neighborhood with volume fractions (0.2, 1.0).
  auto g = unit_grid(2, 1);
  g.volfrac_array()(0, 0) = 0.2;
  g.finalize_boundary(g.box());
  const FrdNeighborhoods nb(g);
  Array2<State> dUc(g.box(), State{});
  dUc(0, 0) = {10, 0, 0, 0};
  dUc(1, 0) = {1, 0, 0, 0};
  CHECK(nonconservative_update(dUc, g, nb, g.domain())(0, 0)[0] == doctest::Approx(2.5));

  g.volfrac_array()(0, 0) = 0.5;
  const FrdNeighborhoods nb2(g);
  const auto r = frd_apply(dUc, g, nb2, g.domain());
  CHECK(r.dU(0, 0)[0] == doctest::Approx(8.0));
  CHECK(r.dU(1, 0)[0] == doctest::Approx(2.0));
  CHECK(r.transfers.size() == 2);

  const auto reg = unit_grid(4, 4);
  const FrdNeighborhoods nr(reg);
  Array2<State> d(reg.box(), State{1, 2, 3, 4});
  const auto rr = frd_apply(d, reg, nr, reg.domain());
  CHECK(rr.transfers.empty());
  CHECK(rr.dU(2, 2) == d(2, 2));

  std::mt19937 rng(77);
  for (int trial = 0; trial < 8; ++trial) {
    const auto gc = random_circle(rng, 24);
    const FrdNeighborhoods nc(gc);
    auto dU = random_field(rng, gc);
    for_each_cell(gc.box(), [&](int i, int j) {
      if (!gc.domain().contains(i, j) || !gc.is_fluid(i, j)) dU(i, j) = State{};
    });
    const auto out = frd_apply(dU, gc, nc, gc.domain());
    State a{}, b{};
    double worst = 0.0, bound = 0.0;
    for_each_cell(gc.domain(), [&](int i, int j) {
      a += gc.volume(i, j) * dU(i, j);
      b += gc.volume(i, j) * out.dU(i, j);
      bound = std::max(bound, std::abs(dU(i, j)[0]));
      if (gc.is_fluid(i, j)) worst = std::max(worst, std::abs(out.dU(i, j)[0]));
    });
    for (int k = 0; k < 4; ++k) CHECK(std::abs(a[k] - b[k]) <= 1e-13 * std::max(1.0, std::abs(a[k])));
    // No 1/V amplification: each cell receives at most a few neighborhood-bounded contributions.
    CHECK(worst <= 10.0 * bound);
  }
}
