#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "ebamr/amr.hpp"
#include "ebamr/bc.hpp"
#include "ebamr/diagnostics.hpp"
#include "ebamr/mol.hpp"

using namespace ebamr;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct ChannelCase {
  int n = 64;
  Integrator integ = Integrator::godunov;
  Redistribution redist = Redistribution::wsrd_normal;
  bool refluxing = true;
  bool rerd = true;
};

std::unique_ptr<Hierarchy> channel(const ChannelCase& c) {
  AmrOptions opt;
  opt.integrator = c.integ;
  opt.redist = c.redist;
  opt.refluxing = c.refluxing;
  opt.rerd = c.rerd;
  opt.cfl = 0.5;
  const double h = 4.0 / c.n;
  auto hp = std::make_unique<Hierarchy>(ImplicitFunction::rotated_channel(kPi / 6.0, 0.172),
                                        Box({0, 0}, {c.n - 1, c.n - 1}), h, h, Point{-2.0, -2.0}, 2, opt);
  const int jlo = static_cast<int>(std::lround((2.0 - 0.125) / h));
  const int jhi = static_cast<int>(std::lround((2.0 + 0.125) / h)) - 1;
  hp->set_valid(1, Box({0, jlo}, {c.n - 1, jhi}).refine(2));
  hp->initialize([](Point x) { return x.x <= 0.0 ? Prim{0.125, 0, 0, 0.1} : Prim{1.0, 0, 0, 1.0}; });
  return hp;
}

double max_rel(const State& d, const State& scale) {
  double m = 0.0;
  for (int k = 0; k < kNcomp; ++k) m = std::max(m, std::abs(d[k]) / scale[k]);
  return m;
}

}  // namespace

TEST_CASE("two-level rotated channel conserves the composite totals") {
  for (auto [integ, redist] : {std::pair{Integrator::godunov, Redistribution::wsrd_normal},
                               std::pair{Integrator::mol, Redistribution::wsrd_normal},
                               std::pair{Integrator::godunov, Redistribution::frd}}) {
    ChannelCase c;
    c.integ = integ;
    c.redist = redist;
    auto h = channel(c);
    CAPTURE(static_cast<int>(integ));
    CAPTURE(static_cast<int>(redist));
    double worst = 0.0;
    for (int s = 0; s < 10; ++s) {
      const double dt = h->stable_dt();
      const StepTotals t = h->advance(dt);
      worst = std::max(worst, max_rel(t.after - t.before - t.bflux, composite_abs_totals(*h)));
    }
    CHECK(worst <= 1e-12);
  }
}

TEST_CASE("with re-redistribution off the defect is explained by the unapplied registers") {
  for (auto [integ, redist] : {std::pair{Integrator::godunov, Redistribution::wsrd_normal},
                               std::pair{Integrator::mol, Redistribution::wsrd_normal},
                               std::pair{Integrator::godunov, Redistribution::frd}}) {
    ChannelCase c;
    c.integ = integ;
    c.redist = redist;
    c.rerd = false;
    auto h = channel(c);
    CAPTURE(static_cast<int>(integ));
    CAPTURE(static_cast<int>(redist));
    double worst = 0.0, biggest = 0.0;
    for (int s = 0; s < 10; ++s) {
      const StepTotals t = h->advance(h->stable_dt());
      const State defect = t.after - t.before - t.bflux;
      worst = std::max(worst, max_rel(defect + t.unapplied, composite_abs_totals(*h)));
      biggest = std::max(biggest, std::abs(defect[0]));
    }
    CHECK(worst <= 1e-12);
    CHECK(biggest > 1e-14);
  }
}

namespace {

std::unique_ptr<Hierarchy> open_box(int n, const Box& fine, Integrator integ = Integrator::godunov) {
  AmrOptions opt;
  opt.integrator = integ;
  opt.bc.side = {BcType::outflow, BcType::outflow, BcType::outflow, BcType::outflow};
  auto h = std::make_unique<Hierarchy>(ImplicitFunction::all_fluid(), Box({0, 0}, {n - 1, n - 1}), 1.0 / n,
                                       1.0 / n, Point{}, 2, opt);
  h->set_valid(1, fine);
  return h;
}

}  // namespace

TEST_CASE("average_down: volume-weighted over fluid children") {
  auto h = open_box(8, Box({4, 4}, {7, 7}));
  Level& F = h->level(1);
  // Children of coarse (2,2): volume fractions 1/2, 1/2, 0, 1 with densities 2, 4, -, 1.
  F.geom.volfrac_array()(4, 4) = 0.5;
  F.geom.volfrac_array()(5, 4) = 0.5;
  F.geom.volfrac_array()(4, 5) = 0.0;
  F.geom.cls_array()(4, 5) = CellClass::body;
  F.U(4, 4)[0] = 2.0;
  F.U(5, 4)[0] = 4.0;
  F.U(4, 5)[0] = 100.0;
  F.U(5, 5)[0] = 1.0;
  h->average_down(0);
  CHECK(h->level(0).U(2, 2)[0] == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("ghost fill: linear data is reproduced and time is interpolated") {
  auto h = open_box(16, Box({8, 8}, {15, 15}));
  h->initialize([](Point x) { return Prim{1.0 + 0.5 * x.x - 0.25 * x.y, 0.1, -0.2, 2.0 + x.x + x.y}; });
  Level& F = h->level(1);
  ConsField U = F.U;
  h->fill_ghost(1, U, h->time());
  double worst = 0.0;
  const Box inner = F.valid.grow(6).intersect(F.geom.domain());
  for_each_cell(inner, [&](int i, int j) {
    if (F.valid.contains(i, j)) return;
    // The coarse field is linear in the conserved variables only through rho; check density.
    const Point x = F.geom.cell_center(i, j);
    worst = std::max(worst, std::abs(U(i, j)[0] - (1.0 + 0.5 * x.x - 0.25 * x.y)));
  });
  CHECK(worst <= 1e-13);

  Level& C = h->level(0);
  C.Uold = C.U;
  C.U.fill(State{3.0, 0, 0, 5.0});
  C.Uold.fill(State{1.0, 0, 0, 3.0});
  C.t_old = 0.0;
  C.dt = 0.2;
  C.t = 0.2;
  ConsField V = F.U;
  h->fill_ghost(1, V, 0.05);
  CHECK(V(7, 8)[0] == doctest::Approx(1.5));
  CHECK(V(7, 8)[3] == doctest::Approx(3.5));
  CHECK(V(8, 8)[0] == F.U(8, 8)[0]);
}

TEST_CASE("ghost fill preserves the coarse content of each parent") {
  auto h = open_box(16, Box({8, 8}, {15, 15}));
  h->initialize([](Point x) {
    const double r = std::hypot(x.x - 0.4, x.y - 0.6);
    return Prim{r < 0.2 ? 2.0 : 1.0, 0.3, 0.0, r < 0.2 ? 3.0 : 1.0};
  });
  Level& F = h->level(1);
  const Level& C = h->level(0);
  ConsField U = F.U;
  h->fill_ghost(1, U, h->time());
  for_each_cell(Box({2, 2}, {3, 7}), [&](int ci, int cj) {
    State s{};
    for_each_cell(Box({ci, cj}, {ci, cj}).refine(2), [&](int i, int j) { s += F.geom.volume(i, j) * U(i, j); });
    for (int k = 0; k < kNcomp; ++k) CHECK(s[k] == doctest::Approx(C.geom.volume(ci, cj) * C.U(ci, cj)[k]).epsilon(1e-14));
  });
}

TEST_CASE("MOL step is Heun's method on a periodic regular mesh") {
  const LevelGeometry g = build_geometry(ImplicitFunction::all_fluid(), Box({0, 0}, {15, 15}), 1.0 / 16, 1.0 / 16);
  DomainBc bc;
  bc.side = {BcType::periodic, BcType::periodic, BcType::periodic, BcType::periodic};
  const Gas gas;
  ConsField U(g.box(), State{});
  for_each_cell(g.domain(), [&](int i, int j) {
    const Point x = g.cell_center(i, j);
    U(i, j) = prim_to_cons({1.0 + 0.2 * std::sin(2 * kPi * x.x) * std::cos(2 * kPi * x.y), 0.5, 0.25, 1.0}, gas);
  });
  fill_physical_bc(U, g.domain(), bc);
  const WsrdOperator w = make_wsrd(g, MergeStrategy::normal);
  const FrdNeighborhoods frd(g);
  LevelOps ops;
  ops.geom = &g;
  ops.wsrd = &w;
  ops.frd = &frd;
  ops.bc = bc;
  const double dt = 0.01;
  const StepResult r = advance_mol(U, 0.0, dt, ops, g.domain(), [&](ConsField& V, double) {
    fill_physical_bc(V, g.domain(), bc);
  });
  const RateResult L0 = mol_rhs(U, g, bc, g.domain(), gas);
  ConsField U1 = U;
  for_each_cell(g.domain(), [&](int i, int j) { U1(i, j) += dt * L0.dU(i, j); });
  fill_physical_bc(U1, g.domain(), bc);
  const RateResult L1 = mol_rhs(U1, g, bc, g.domain(), gas);
  double worst = 0.0;
  for_each_cell(g.domain(), [&](int i, int j) {
    const State e = U(i, j) + (0.5 * dt) * (L0.dU(i, j) + L1.dU(i, j)) - r.U(i, j);
    for (double v : e) worst = std::max(worst, std::abs(v));
  });
  CHECK(worst <= 1e-14);
  REQUIRE(r.stages.size() == 2);
  CHECK(r.stages[0].weight == 0.5);
  CHECK(r.stages[1].weight == 0.5);

  // On a regular mesh the redistributed increment is the raw rate.
  const Array2<State> inc = wsrd_increment(U, L0.dU, dt, g, w, g.domain());
  worst = 0.0;
  for_each_cell(g.domain(), [&](int i, int j) {
    for (int k = 0; k < kNcomp; ++k) worst = std::max(worst, std::abs(inc(i, j)[k] - L0.dU(i, j)[k]));
  });
  CHECK(worst <= 1e-11);
}

TEST_CASE("free stream along the rotated channel on two levels") {
  for (auto [integ, redist] : {std::pair{Integrator::godunov, Redistribution::wsrd_normal},
                               std::pair{Integrator::mol, Redistribution::wsrd_central},
                               std::pair{Integrator::godunov, Redistribution::frd}}) {
    AmrOptions opt;
    opt.integrator = integ;
    opt.redist = redist;
    opt.bc.side = {BcType::outflow, BcType::outflow, BcType::outflow, BcType::outflow};
    const int n = 64;
    const double hh = 4.0 / n;
    Hierarchy h(ImplicitFunction::rotated_channel(kPi / 6.0, 0.172), Box({0, 0}, {n - 1, n - 1}), hh, hh,
                Point{-2.0, -2.0}, 2, opt);
    h.set_valid(1, Box({0, 30}, {n - 1, 33}).refine(2));
    const Prim w0{1.0, 0.6 * std::cos(kPi / 6.0), 0.6 * std::sin(kPi / 6.0), 1.0};
    h.initialize([&](Point) { return w0; });
    const State u0 = prim_to_cons(w0, opt.gas);
    for (int s = 0; s < 10; ++s) h.advance(h.stable_dt());
    double worst = 0.0;
    for (int l = 0; l < 2; ++l) {
      const Level& L = h.level(l);
      for_each_cell(L.valid, [&](int i, int j) {
        if (!L.geom.is_fluid(i, j)) return;
        for (int k = 0; k < kNcomp; ++k) worst = std::max(worst, std::abs(L.U(i, j)[k] - u0[k]));
      });
    }
    CAPTURE(static_cast<int>(integ));
    CAPTURE(static_cast<int>(redist));
    CHECK(worst <= 1e-12);
  }
}

TEST_CASE("regrid follows the tags, keeps data and conserves") {
  auto h = open_box(32, Box{});
  h->initialize([](Point x) { return x.x < 0.3 ? Prim{1.0, 0, 0, 1.0} : Prim{0.125, 0, 0, 0.1}; });
  const State before = h->composite_totals();
  h->regrid(0, 0.05);
  REQUIRE(h->finest() == 1);
  const Box v = h->level(1).valid;
  // Tags at coarse columns 9 and 10, buffered by two.
  CHECK(v == Box({7, 0}, {12, 31}).refine(2));
  const State after = h->composite_totals();
  for (int k = 0; k < kNcomp; ++k) CHECK(after[k] == doctest::Approx(before[k]).epsilon(1e-14));
  CHECK(h->properly_nested());
  h->level(0).U.fill(prim_to_cons({1, 0, 0, 1}, Gas{}));
  h->regrid(0, 0.05);
  CHECK(h->finest() == 0);
}

TEST_CASE("ledger rows and CSV columns") {
  ConservationLedger led(true, false);
  StepTotals s;
  s.before = {1, 0, 0, 2};
  s.after = {1.5, 0, 0, 2};
  s.bflux = {0.25, 0, 0, 0};
  s.cf_mass = 3.0;
  const LedgerRow& r = led.record(1, 0.1, 0.1, s, State{10, 1, 1, 10});
  CHECK(r.defect[0] == doctest::Approx(0.25));
  CHECK(led.max_relative_defect() == doctest::Approx(0.025));
  std::ostringstream os;
  led.write_csv(os);
  std::string text = os.str();
  const std::string header = text.substr(text.find('\n') + 1, text.find('\n', text.find('\n') + 1) - text.find('\n') - 1);
  CHECK(header.rfind("step,time,dt,mass,mom_x,mom_y,energy,d_mass,", 0) == 0);
  for (const char* col : {"bflux_mass", "cfflux_mass", "sync_mass", "defect_mass"}) CHECK(header.find(col) != std::string::npos);
}
