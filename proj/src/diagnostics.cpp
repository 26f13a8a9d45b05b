#include "ebamr/diagnostics.hpp"

#include <cmath>
#include <ostream>

#include "ebamr/amr.hpp"

namespace ebamr {

State boundary_gain(const FaceFluxes& F, const LevelGeometry& geom, const Box& valid, const Box& covered) {
  State g{};
  const Box& dom = geom.domain();
  auto counted = [&](int i, int j) {
    return valid.contains(i, j) && geom.is_fluid(i, j) && !(!covered.empty() && covered.contains(i, j));
  };
  for (int d = 0; d < 2; ++d) {
    const IntVect e = unit(d);
    const Box fb = valid.intersect(dom);
    // Low domain side: flux enters the cell above it.
    if (fb.lo[d] == dom.lo[d]) {
      Box side = fb;
      side.hi[d] = side.lo[d];
      for_each_cell(side, [&](int i, int j) {
        if (!counted(i, j) || geom.face_area(d, i, j) <= 0.0) return;
        g += geom.face_area(d, i, j) * F.f[d](i, j);
      });
    }
    if (fb.hi[d] == dom.hi[d]) {
      Box side = fb;
      side.lo[d] = side.hi[d];
      for_each_cell(side, [&](int i, int j) {
        const int fi = i + e.i, fj = j + e.j;
        if (!counted(i, j) || geom.face_area(d, fi, fj) <= 0.0) return;
        g -= geom.face_area(d, fi, fj) * F.f[d](fi, fj);
      });
    }
  }
  for_each_cell(valid.intersect(dom), [&](int i, int j) {
    if (!counted(i, j) || !geom.is_cut(i, j) || geom.eb_area(i, j) <= 0.0) return;
    g += geom.eb_area(i, j) * F.eb(i, j);
  });
  return g;
}

const LedgerRow& ConservationLedger::record(int step, double time, double dt, const StepTotals& s,
                                            const State& scale) {
  LedgerRow r;
  r.step = step;
  r.time = time;
  r.dt = dt;
  r.total = s.after;
  r.change = s.after - s.before;
  r.bflux = s.bflux;
  r.sync = s.sync;
  r.defect = r.change - r.bflux;
  r.unapplied = s.unapplied;
  r.scale = scale;
  r.cf_mass = s.cf_mass;
  rows_.push_back(r);
  return rows_.back();
}

double ConservationLedger::max_relative_defect() const {
  double m = 0.0;
  for (const auto& r : rows_) {
    for (int k = 0; k < kNcomp; ++k) {
      if (r.scale[k] > 0.0) m = std::max(m, std::abs(r.defect[k]) / r.scale[k]);
    }
  }
  return m;
}

void ConservationLedger::write_csv(std::ostream& os) const {
  static const char* names[kNcomp] = {"mass", "mom_x", "mom_y", "energy"};
  os << "# refluxing=" << (refluxing_ ? 1 : 0) << " rerd=" << (rerd_ ? 1 : 0) << '\n';
  os << "step,time,dt";
  for (auto n : names) os << ',' << n;
  for (auto n : names) os << ",d_" << n;
  for (auto n : names) os << ",bflux_" << n;
  os << ",cfflux_mass";
  for (auto n : names) os << ",sync_" << n;
  for (auto n : names) os << ",defect_" << n;
  for (auto n : names) os << ",unapplied_" << n;
  os << '\n';
  os.precision(17);
  for (const auto& r : rows_) {
    os << r.step << ',' << r.time << ',' << r.dt;
    for (double v : r.total) os << ',' << v;
    for (double v : r.change) os << ',' << v;
    for (double v : r.bflux) os << ',' << v;
    os << ',' << r.cf_mass;
    for (double v : r.sync) os << ',' << v;
    for (double v : r.defect) os << ',' << v;
    for (double v : r.unapplied) os << ',' << v;
    os << '\n';
  }
}

State composite_abs_totals(const Hierarchy& h) {
  State s{};
  for (int l = 0; l <= h.finest(); ++l) {
    const Level& L = h.level(l);
    const Box cov = h.covered(l);
    for_each_cell(L.valid, [&](int i, int j) {
      if (!L.geom.is_fluid(i, j) || (!cov.empty() && cov.contains(i, j))) return;
      const State& u = L.U(i, j);
      const double v = L.geom.volume(i, j);
      // |m| <= sqrt(2 rho E), so momentum has a scale even where it starts out zero.
      const double mscale = std::sqrt(2.0 * std::abs(u[0] * u[3]));
      s[0] += v * std::abs(u[0]);
      s[1] += v * mscale;
      s[2] += v * mscale;
      s[3] += v * std::abs(u[3]);
    });
  }
  return s;
}

std::vector<ProfileSample> centerline_profile(const Hierarchy& h, Point center, double theta, double s0, double s1,
                                              double ds) {
  std::vector<ProfileSample> out;
  const double c = std::cos(theta), sn = std::sin(theta);
  const int n = static_cast<int>(std::floor((s1 - s0) / ds + 1e-9)) + 1;
  for (int k = 0; k < n; ++k) {
    ProfileSample p;
    p.s = s0 + k * ds;
    const Point x{center.x + p.s * c, center.y + p.s * sn};
    for (int l = h.finest(); l >= 0; --l) {
      const Level& L = h.level(l);
      const Point o = L.geom.origin();
      const int i = static_cast<int>(std::floor((x.x - o.x) / L.geom.dx()));
      const int j = static_cast<int>(std::floor((x.y - o.y) / L.geom.dy()));
      if (!L.valid.contains(i, j)) continue;
      if (L.geom.is_fluid(i, j)) {
        const Prim w = cons_to_prim(L.U(i, j), h.options().gas);
        p.w = Prim{w.rho, w.u * c + w.v * sn, -w.u * sn + w.v * c, w.p};
        p.fluid = true;
      }
      break;
    }
    out.push_back(p);
  }
  return out;
}

void attach_exact(std::vector<ProfileSample>& prof, const Prim& left, const Prim& right, double t, const Gas& gas) {
  const ExactRiemann rs(left, right, gas);
  for (auto& p : prof) {
    if (t > 0.0) p.exact = rs.sample(p.s / t);
    else p.exact = p.s < 0.0 ? left : right;
  }
}

double l1_density_error(const std::vector<ProfileSample>& prof, double a, double b) {
  double e = 0.0;
  int n = 0;
  for (const auto& p : prof) {
    if (!p.fluid || p.s < a || p.s > b) continue;
    e += std::abs(p.w.rho - p.exact.rho);
    ++n;
  }
  return n > 0 ? e / n : 0.0;
}

void write_profile_csv(const std::vector<ProfileSample>& prof, std::ostream& os) {
  os << "s,rho,u,v,p,T,exact_rho,exact_u,exact_p,exact_T\n";
  os.precision(17);
  for (const auto& p : prof) {
    if (!p.fluid) continue;
    const double te = p.exact.rho > 0.0 ? p.exact.p / p.exact.rho : 0.0;
    os << p.s << ',' << p.w.rho << ',' << p.w.u << ',' << p.w.v << ',' << p.w.p << ',' << p.w.p / p.w.rho << ','
       << p.exact.rho << ',' << p.exact.u << ',' << p.exact.p << ',' << te << '\n';
  }
}

Array2<double> schlieren(const ConsField& U, const LevelGeometry& geom, const Box& region) {
  Array2<double> s(region, 0.0);
  auto ok = [&](int i, int j) { return U.box().contains(i, j) && geom.box().contains(i, j) && geom.is_fluid(i, j); };
  for_each_cell(region, [&](int i, int j) {
    if (!ok(i, j)) return;
    double g2 = 0.0;
    for (int d = 0; d < 2; ++d) {
      const IntVect e = unit(d);
      const bool m = ok(i - e.i, j - e.j), p = ok(i + e.i, j + e.j);
      double g = 0.0;
      if (m && p) g = (U(i + e.i, j + e.j)[0] - U(i - e.i, j - e.j)[0]) / (2.0 * geom.h(d));
      else if (p) g = (U(i + e.i, j + e.j)[0] - U(i, j)[0]) / geom.h(d);
      else if (m) g = (U(i, j)[0] - U(i - e.i, j - e.j)[0]) / geom.h(d);
      g2 += g * g;
    }
    s(i, j) = std::sqrt(g2);
  });
  return s;
}

void write_level_csv(const ConsField& U, const LevelGeometry& geom, const Box& valid, const Gas& gas,
                     std::ostream& os) {
  os << "i,j,x,y,vol_frac,rho,u,v,p\n";
  os.precision(17);
  for_each_cell(valid, [&](int i, int j) {
    if (!geom.is_fluid(i, j)) return;
    const Point x = geom.cell_center(i, j);
    const Prim w = cons_to_prim(U(i, j), gas);
    os << i << ',' << j << ',' << x.x << ',' << x.y << ',' << geom.vol_frac(i, j) << ',' << w.rho << ',' << w.u
       << ',' << w.v << ',' << w.p << '\n';
  });
}

void write_schlieren_csv(const Hierarchy& h, std::ostream& os) {
  os << "level,i,j,x,y,dx,schlieren\n";
  os.precision(17);
  for (int l = 0; l <= h.finest(); ++l) {
    const Level& L = h.level(l);
    const Box cov = h.covered(l);
    const Array2<double> s = schlieren(L.U, L.geom, L.valid);
    for_each_cell(L.valid, [&](int i, int j) {
      if (!cov.empty() && cov.contains(i, j)) return;
      const Point x = L.geom.cell_center(i, j);
      os << l << ',' << i << ',' << j << ',' << x.x << ',' << x.y << ',' << L.geom.dx() << ',' << s(i, j) << '\n';
    });
  }
}

}  // namespace ebamr
