#include "ebamr/geometry.hpp"

#include <cmath>
#include <ostream>
#include <sstream>
#include <vector>

namespace ebamr {

ImplicitFunction ImplicitFunction::rotated_channel(double angle, double half_width, Point center) {
  return ImplicitFunction(RotatedChannel{angle, half_width, center});
}

ImplicitFunction ImplicitFunction::circle(Point center, double radius, FluidSide side) {
  return ImplicitFunction(Circle{center, radius, side});
}

ImplicitFunction ImplicitFunction::all_fluid() { return ImplicitFunction(AllFluid{}); }

double ImplicitFunction::operator()(double x, double y) const {
  if (const auto* ch = std::get_if<RotatedChannel>(&shape_)) {
    const double s = std::sin(ch->angle), c = std::cos(ch->angle);
    const double d = -(x - ch->center.x) * s + (y - ch->center.y) * c;
    return std::abs(d) - ch->half_width;
  }
  if (const auto* ci = std::get_if<Circle>(&shape_)) {
    const double r = std::hypot(x - ci->center.x, y - ci->center.y) - ci->radius;
    return ci->fluid_side == FluidSide::outside ? -r : r;
  }
  return -1.0;
}

const char* to_string(CellClass c) {
  switch (c) {
    case CellClass::body: return "body";
    case CellClass::cut: return "cut";
    case CellClass::regular: return "regular";
  }
  return "?";
}

LevelGeometry::LevelGeometry(const Box& domain, double dx, double dy, Point origin)
    : domain_(domain), box_(domain.grow(kGhost)), dx_(dx), dy_(dy), origin_(origin) {
  volfrac_ = Array2<double>(box_, 0.0);
  for (int d = 0; d < 2; ++d) {
    areafrac_[d] = Array2<double>(box_.faces(d), 0.0);
    facecent_[d] = Array2<double>(box_.faces(d), 0.0);
  }
  centroid_ = Array2<std::array<double, 2>>(box_, {0.0, 0.0});
  eb_area_ = Array2<double>(box_, 0.0);
  eb_normal_ = Array2<std::array<double, 2>>(box_, {0.0, 0.0});
  eb_centroid_ = Array2<std::array<double, 2>>(box_, {0.0, 0.0});
  cls_ = Array2<CellClass>(box_, CellClass::body);
}

CellGeom LevelGeometry::cell(int i, int j) const {
  CellGeom g;
  g.vol_frac = volfrac_(i, j);
  g.area_frac = {areafrac_[0](i, j), areafrac_[0](i + 1, j), areafrac_[1](i, j), areafrac_[1](i, j + 1)};
  g.centroid = centroid_(i, j);
  g.face_centroid = {facecent_[0](i, j), facecent_[0](i + 1, j), facecent_[1](i, j), facecent_[1](i, j + 1)};
  g.eb_area = eb_area_(i, j);
  g.eb_normal = eb_normal_(i, j);
  g.eb_centroid = eb_centroid_(i, j);
  g.cls = cls_(i, j);
  return g;
}

void LevelGeometry::finalize_boundary(const Box& region) {
  for_each_cell(region, [&](int i, int j) {
    const double lam = volfrac_(i, j);
    if (lam == 0.0) {
      cls_(i, j) = CellClass::body;
      eb_area_(i, j) = 0.0;
      eb_normal_(i, j) = {0.0, 0.0};
      return;
    }
    const double vx = (areafrac_[0](i + 1, j) - areafrac_[0](i, j)) * dy_;
    const double vy = (areafrac_[1](i, j + 1) - areafrac_[1](i, j)) * dx_;
    const double len = std::hypot(vx, vy);
    eb_area_(i, j) = len;
    eb_normal_(i, j) = len > 0.0 ? std::array<double, 2>{vx / len, vy / len} : std::array<double, 2>{0.0, 0.0};
    const bool full_faces = areafrac_[0](i, j) == 1.0 && areafrac_[0](i + 1, j) == 1.0 &&
                            areafrac_[1](i, j) == 1.0 && areafrac_[1](i, j + 1) == 1.0;
    cls_(i, j) = (lam == 1.0 && full_faces) ? CellClass::regular : CellClass::cut;
  });
}

namespace {

double snap(double v) {
  if (v < kSnapTol) return 0.0;
  if (v > 1.0 - kSnapTol) return 1.0;
  return v;
}

/// Parameter t in [0,1] where fn crosses zero on the segment p0->p1, given f0 < 0 <= f1.
double edge_root(const ImplicitFunction& fn, Point p0, Point p1, double f0, double f1) {
  auto f = [&](double t) { return fn(p0.x + t * (p1.x - p0.x), p0.y + t * (p1.y - p0.y)); };
  if (f1 == 0.0) return 1.0;
  // Illinois variant of regula falsi; exact in one step for a linear level set.
  double a = 0.0, b = 1.0, fa = f0, fb = f1;
  int side = 0;
  for (int it = 0; it < 200; ++it) {
    const double t = (a * fb - b * fa) / (fb - fa);
    const double ft = f(t);
    if (ft == 0.0 || b - a < 1e-16) return t;
    if (ft < 0.0) {
      a = t;
      fa = ft;
      if (side == -1) fb *= 0.5;
      side = -1;
    } else {
      b = t;
      fb = ft;
      if (side == 1) fa *= 0.5;
      side = 1;
    }
    if (std::abs(ft) < 1e-15 * (std::abs(f0) + std::abs(f1))) return t;
  }
  return 0.5 * (a + b);
}

struct EdgeCut {
  bool mixed = false;
  double s = 0.0;  // crossing position along the edge in [0,1] from its low node
  double frac = 0.0;
  double cent = 0.0;  // fluid-segment midpoint offset in [-1/2, 1/2]
};

}  // namespace

LevelGeometry build_geometry(const ImplicitFunction& fn, const Box& domain, double dx, double dy, Point origin) {
  if (!(dx > 0.0) || !(dy > 0.0)) {
    throw GeometryError(GeometryError::Kind::DegenerateGeometry, "mesh spacing must be positive");
  }
  LevelGeometry g(domain, dx, dy, origin);
  const Box box = g.box();
  const Box nodes = box.faces(0).faces(1);
  Array2<double> phi(nodes);
  for_each_cell(nodes, [&](int i, int j) { phi(i, j) = fn(origin.x + i * dx, origin.y + j * dy); });
  auto body = [&](int i, int j) { return phi(i, j) >= 0.0; };
  auto node = [&](int i, int j) { return Point{origin.x + i * dx, origin.y + j * dy}; };

  // Edge intersections, shared by the two cells adjacent to each face.
  std::array<Array2<EdgeCut>, 2> cuts{Array2<EdgeCut>(box.faces(0)), Array2<EdgeCut>(box.faces(1))};
  for (int d = 0; d < 2; ++d) {
    const IntVect t = unit(1 - d);
    for_each_cell(box.faces(d), [&](int i, int j) {
      EdgeCut& e = cuts[d](i, j);
      const bool b0 = body(i, j), b1 = body(i + t.i, j + t.j);
      if (!b0 && !b1) {
        e.frac = 1.0;
      } else if (b0 != b1) {
        e.mixed = true;
        const double f0 = phi(i, j), f1 = phi(i + t.i, j + t.j);
        e.s = b0 ? 1.0 - edge_root(fn, node(i + t.i, j + t.j), node(i, j), f1, f0)
                 : edge_root(fn, node(i, j), node(i + t.i, j + t.j), f0, f1);
        if (b0) {
          e.frac = 1.0 - e.s;
          e.cent = 0.5 * (e.s + 1.0) - 0.5;
        } else {
          e.frac = e.s;
          e.cent = 0.5 * e.s - 0.5;
        }
      }
      const double a = snap(e.frac);
      g.areafrac_array(d)(i, j) = a;
      g.facecent_array(d)(i, j) = (a == 0.0 || a == 1.0) ? 0.0 : e.cent;
    });
  }

  for_each_cell(box, [&](int i, int j) {
    // Corners counter-clockwise from the low-left node, in cell units about the center.
    const std::array<IntVect, 4> cn{IntVect{i, j}, IntVect{i + 1, j}, IntVect{i + 1, j + 1}, IntVect{i, j + 1}};
    const std::array<std::array<double, 2>, 4> cu{{{-0.5, -0.5}, {0.5, -0.5}, {0.5, 0.5}, {-0.5, 0.5}}};
    // Edge k joins corner k to corner k+1; record the crossing in the same orientation.
    std::vector<std::array<double, 2>> poly;
    std::vector<std::array<double, 2>> crossings;
    for (int k = 0; k < 4; ++k) {
      const IntVect a = cn[k];
      if (!body(a.i, a.j)) poly.push_back(cu[k]);
      const IntVect b = cn[(k + 1) % 4];
      if (body(a.i, a.j) == body(b.i, b.j)) continue;
      double s = 0.0;  // position from corner k toward corner k+1
      switch (k) {
        case 0: s = cuts[1](i, j).s; break;
        case 1: s = cuts[0](i + 1, j).s; break;
        case 2: s = 1.0 - cuts[1](i, j + 1).s; break;
        case 3: s = 1.0 - cuts[0](i, j).s; break;
      }
      const auto& p = cu[k];
      const auto& q = cu[(k + 1) % 4];
      const std::array<double, 2> x{p[0] + s * (q[0] - p[0]), p[1] + s * (q[1] - p[1])};
      poly.push_back(x);
      crossings.push_back(x);
    }
    if (crossings.size() > 2) {
      std::ostringstream os;
      os << "boundary crosses the edges of cell (" << i << "," << j << ") " << crossings.size() << " times";
      throw GeometryError(GeometryError::Kind::MultiplyCutCell, os.str(), {i, j});
    }
    double area = 0.0, cx = 0.0, cy = 0.0;
    const std::size_t n = poly.size();
    for (std::size_t k = 0; k < n; ++k) {
      const auto& p = poly[k];
      const auto& q = poly[(k + 1) % n];
      const double w = p[0] * q[1] - q[0] * p[1];
      area += w;
      cx += (p[0] + q[0]) * w;
      cy += (p[1] + q[1]) * w;
    }
    area *= 0.5;
    if (area < -kSnapTol || area > 1.0 + kSnapTol) {
      std::ostringstream os;
      os << "volume fraction " << area << " out of range in cell (" << i << "," << j << ")";
      throw GeometryError(GeometryError::Kind::DegenerateGeometry, os.str(), {i, j});
    }
    const double lam = snap(area);
    g.volfrac_array()(i, j) = lam;
    if (lam > 0.0 && lam < 1.0) {
      g.centroid_array()(i, j) = {cx / (6.0 * area), cy / (6.0 * area)};
    }
    if (crossings.size() == 2 && lam > 0.0) {
      g.eb_centroid_array()(i, j) = {0.5 * (crossings[0][0] + crossings[1][0]),
                                     0.5 * (crossings[0][1] + crossings[1][1])};
    }
  });

  // A cell snapped to zero volume closes all of its faces.
  for_each_cell(box, [&](int i, int j) {
    if (g.vol_frac(i, j) != 0.0) return;
    g.areafrac_array(0)(i, j) = g.areafrac_array(0)(i + 1, j) = 0.0;
    g.areafrac_array(1)(i, j) = g.areafrac_array(1)(i, j + 1) = 0.0;
    g.centroid_array()(i, j) = {0.0, 0.0};
  });
  g.finalize_boundary(box);
  return g;
}

LevelGeometry coarsen_geometry(const LevelGeometry& fine, int r) {
  const Box& fd = fine.domain();
  if (r < 1 || fd.lo.i % r != 0 || fd.lo.j % r != 0 || fd.length(0) % r != 0 || fd.length(1) % r != 0) {
    std::ostringstream os;
    os << "fine domain " << fd << " is not divisible by " << r;
    throw GeometryError(GeometryError::Kind::IncompatibleBoxes, os.str());
  }
  LevelGeometry c(fd.coarsen(r), fine.dx() * r, fine.dy() * r, fine.origin());
  const Box& fb = fine.box();
  const double rr = static_cast<double>(r);
  for_each_cell(c.box(), [&](int I, int J) {
    if (!fb.contains(Box({I * r, J * r}, {I * r + r - 1, J * r + r - 1}))) return;
    double vol = 0.0, mx = 0.0, my = 0.0, eba = 0.0, ex = 0.0, ey = 0.0;
    for (int jj = 0; jj < r; ++jj) {
      for (int ii = 0; ii < r; ++ii) {
        const int i = I * r + ii, j = J * r + jj;
        const double l = fine.vol_frac(i, j);
        const auto fcen = fine.centroid(i, j);
        // Fine centroid expressed in coarse cell units about the coarse center.
        vol += l;
        mx += l * ((ii + 0.5 + fcen[0]) / rr - 0.5);
        my += l * ((jj + 0.5 + fcen[1]) / rr - 0.5);
        const double a = fine.eb_area(i, j);
        const auto ecen = fine.eb_centroid(i, j);
        eba += a;
        ex += a * ((ii + 0.5 + ecen[0]) / rr - 0.5);
        ey += a * ((jj + 0.5 + ecen[1]) / rr - 0.5);
      }
    }
    const double lam = vol / (rr * rr);
    c.volfrac_array()(I, J) = lam;
    c.centroid_array()(I, J) = (lam > 0.0 && lam < 1.0) ? std::array<double, 2>{mx / vol, my / vol}
                                                         : std::array<double, 2>{0.0, 0.0};
    c.eb_centroid_array()(I, J) = eba > 0.0 ? std::array<double, 2>{ex / eba, ey / eba}
                                            : std::array<double, 2>{0.0, 0.0};
  });
  for (int d = 0; d < 2; ++d) {
    const IntVect t = unit(1 - d);
    for_each_cell(c.box().faces(d), [&](int I, int J) {
      const IntVect f0{I * r, J * r};
      const IntVect flast = f0 + IntVect{t.i * (r - 1), t.j * (r - 1)};
      if (!fine.box().faces(d).contains(f0) || !fine.box().faces(d).contains(flast)) return;
      double a = 0.0, m = 0.0;
      for (int k = 0; k < r; ++k) {
        const int i = f0.i + k * t.i, j = f0.j + k * t.j;
        const double af = fine.area_frac(d, i, j);
        a += af;
        m += af * ((k + 0.5 + fine.face_centroid(d, i, j)) / rr - 0.5);
      }
      c.areafrac_array(d)(I, J) = a / rr;
      c.facecent_array(d)(I, J) = (a > 0.0 && a < rr) ? m / a : 0.0;
    });
  }
  c.finalize_boundary(c.box().grow(-1));
  return c;
}

void extend_geometry_ghosts(LevelGeometry& g, const DomainBc& bc) {
  const Box& dom = g.domain();
  const Box& box = g.box();
  for (int d = 0; d < 2; ++d) {
    const int t = 1 - d;
    const int lo = dom.lo[d], hi = dom.hi[d], len = dom.length(d);
    auto cell_image = [&](int n) {
      const BcType b = n < lo ? bc.lo(d) : bc.hi(d);
      if (b == BcType::periodic) return n < lo ? n + len : n - len;
      if (b == BcType::outflow) return n < lo ? lo : hi;
      return n < lo ? 2 * lo - 1 - n : 2 * hi + 1 - n;
    };
    auto face_image = [&](int n) {
      const BcType b = n < lo ? bc.lo(d) : bc.hi(d);
      if (b == BcType::periodic) return n < lo ? n + len : n - len;
      if (b == BcType::outflow) return n < lo ? lo : hi + 1;
      return n < lo ? 2 * lo - n : 2 * (hi + 1) - n;
    };
    auto mirrored = [&](int n) {
      return (n < lo ? bc.lo(d) : bc.hi(d)) == BcType::wall;
    };
    // First pass sweeps tangential rows inside the domain; second pass covers everything.
    const int tlo = d == 0 ? dom.lo[t] : box.lo[t];
    const int thi = d == 0 ? dom.hi[t] : box.hi[t];
    auto at = [&](int n, int s) { return d == 0 ? IntVect{n, s} : IntVect{s, n}; };
    for (int s = tlo; s <= thi; ++s) {
      for (int n = box.lo[d]; n <= box.hi[d]; ++n) {
        if (n >= lo && n <= hi) continue;
        const bool flip = mirrored(n);
        const IntVect dst = at(n, s), src = at(cell_image(n), s);
        g.volfrac_array()(dst) = g.vol_frac(src.i, src.j);
        auto cen = g.centroid(src.i, src.j);
        auto ecen = g.eb_centroid(src.i, src.j);
        if (flip) {
          cen[d] = -cen[d];
          ecen[d] = -ecen[d];
        }
        g.centroid_array()(dst) = cen;
        g.eb_centroid_array()(dst) = ecen;
        // Tangential faces of this ghost cell (low and, at the row end, high).
        for (int e = 0; e <= (s == thi ? 1 : 0); ++e) {
          const IntVect fd = dst + IntVect{e * unit(t).i, e * unit(t).j};
          const IntVect fs = src + IntVect{e * unit(t).i, e * unit(t).j};
          g.areafrac_array(t)(fd) = g.area_frac(t, fs.i, fs.j);
          const double fc = g.face_centroid(t, fs.i, fs.j);
          g.facecent_array(t)(fd) = flip ? -fc : fc;
        }
      }
      for (int n = box.lo[d]; n <= box.hi[d] + 1; ++n) {
        if (n >= lo && n <= hi + 1) continue;
        const IntVect dst = at(n, s), src = at(face_image(n), s);
        g.areafrac_array(d)(dst) = g.area_frac(d, src.i, src.j);
        g.facecent_array(d)(dst) = g.face_centroid(d, src.i, src.j);
      }
    }
  }
  // Class and boundary vectors of ghost cells follow from the copied fractions.
  for_each_cell(box, [&](int i, int j) {
    if (dom.contains(i, j)) return;
    g.finalize_boundary(Box({i, j}, {i, j}));
  });
}

void write_geometry_csv(const LevelGeometry& g, std::ostream& os) {
  os << "i,j,vol_frac,ax_lo,ax_hi,ay_lo,ay_hi,Af,nfx,nfy,class\n";
  os.precision(17);
  for_each_cell(g.domain(), [&](int i, int j) {
    const auto n = g.eb_normal(i, j);
    os << i << ',' << j << ',' << g.vol_frac(i, j) << ',' << g.area_frac(0, i, j) << ','
       << g.area_frac(0, i + 1, j) << ',' << g.area_frac(1, i, j) << ',' << g.area_frac(1, i, j + 1) << ','
       << g.eb_area(i, j) << ',' << n[0] << ',' << n[1] << ',' << to_string(g.cls(i, j)) << '\n';
  });
}

}  // namespace ebamr
