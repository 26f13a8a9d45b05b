#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <variant>

#include "ebamr/box.hpp"

namespace ebamr {

/// Ghost width of every geometry and state array.
inline constexpr int kGhost = 8;

/// Fractions below this (or within it of one) are snapped to exactly 0 (or 1).
inline constexpr double kSnapTol = 1.0e-12;

class GeometryError : public std::runtime_error {
 public:
  enum class Kind { MultiplyCutCell, DegenerateGeometry, IncompatibleBoxes };
  GeometryError(Kind kind, const std::string& what, IntVect cell = {})
      : std::runtime_error(what), kind_(kind), cell_(cell) {}
  Kind kind() const { return kind_; }
  IntVect cell() const { return cell_; }

 private:
  Kind kind_;
  IntVect cell_;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

enum class FluidSide { inside, outside };

/// Signed level set: negative in the fluid, positive in the body, zero on the boundary.
class ImplicitFunction {
 public:
  struct RotatedChannel {
    double angle;
    double half_width;
    Point center;
  };
  struct Circle {
    Point center;
    double radius;
    FluidSide fluid_side;
  };
  struct AllFluid {};

  static ImplicitFunction rotated_channel(double angle, double half_width, Point center = {});
  static ImplicitFunction circle(Point center, double radius, FluidSide side);
  static ImplicitFunction all_fluid();

  double operator()(double x, double y) const;
  bool is_all_fluid() const { return std::holds_alternative<AllFluid>(shape_); }
  const std::variant<RotatedChannel, Circle, AllFluid>& shape() const { return shape_; }

 private:
  explicit ImplicitFunction(std::variant<RotatedChannel, Circle, AllFluid> s) : shape_(s) {}
  std::variant<RotatedChannel, Circle, AllFluid> shape_;
};

enum class CellClass : std::uint8_t { body = 0, cut = 1, regular = 2 };

enum class BcType { outflow, wall, periodic };

/// Physical boundary condition per domain side, ordered x-lo, x-hi, y-lo, y-hi.
struct DomainBc {
  std::array<BcType, 4> side{BcType::wall, BcType::wall, BcType::wall, BcType::wall};
  BcType lo(int dir) const { return side[2 * dir]; }
  BcType hi(int dir) const { return side[2 * dir + 1]; }
};

/// Snapshot of the embedded-boundary data of one cell. Offsets are in units of the cell size,
/// measured from the cell center.
struct CellGeom {
  double vol_frac = 0.0;
  std::array<double, 4> area_frac{};       // x-lo, x-hi, y-lo, y-hi
  std::array<double, 2> centroid{};
  std::array<double, 4> face_centroid{};   // tangential offset of each face's fluid part
  double eb_area = 0.0;                    // boundary length times unit depth
  std::array<double, 2> eb_normal{};       // unit, body -> fluid
  std::array<double, 2> eb_centroid{};
  CellClass cls = CellClass::body;
};

/// Embedded-boundary description of one refinement level. Arrays cover `domain` grown by
/// kGhost cells; everything outside `domain` is either computed from the implicit function
/// (standalone builds) or filled from interior data by `extend_geometry_ghosts`.
class LevelGeometry {
 public:
  LevelGeometry() = default;
  LevelGeometry(const Box& domain, double dx, double dy, Point origin);

  const Box& domain() const { return domain_; }
  const Box& box() const { return box_; }
  double dx() const { return dx_; }
  double dy() const { return dy_; }
  double h(int dir) const { return dir == 0 ? dx_ : dy_; }
  Point origin() const { return origin_; }
  double cell_volume() const { return dx_ * dy_; }
  double v_target() const { return 0.5 * dx_ * dy_; }

  double vol_frac(int i, int j) const { return volfrac_(i, j); }
  double volume(int i, int j) const { return volfrac_(i, j) * dx_ * dy_; }
  /// Area fraction of the face on the low side of cell (i,j) normal to dir.
  double area_frac(int dir, int i, int j) const { return areafrac_[dir](i, j); }
  double face_area(int dir, int i, int j) const { return areafrac_[dir](i, j) * (dir == 0 ? dy_ : dx_); }
  double face_centroid(int dir, int i, int j) const { return facecent_[dir](i, j); }
  CellClass cls(int i, int j) const { return cls_(i, j); }
  bool is_fluid(int i, int j) const { return cls_(i, j) != CellClass::body; }
  bool is_cut(int i, int j) const { return cls_(i, j) == CellClass::cut; }
  bool is_regular(int i, int j) const { return cls_(i, j) == CellClass::regular; }
  double eb_area(int i, int j) const { return eb_area_(i, j); }
  std::array<double, 2> eb_normal(int i, int j) const { return eb_normal_(i, j); }
  std::array<double, 2> centroid(int i, int j) const { return centroid_(i, j); }
  std::array<double, 2> eb_centroid(int i, int j) const { return eb_centroid_(i, j); }

  Point cell_center(int i, int j) const {
    return {origin_.x + (i + 0.5) * dx_, origin_.y + (j + 0.5) * dy_};
  }
  Point cell_centroid(int i, int j) const {
    const auto c = centroid_(i, j);
    return {origin_.x + (i + 0.5 + c[0]) * dx_, origin_.y + (j + 0.5 + c[1]) * dy_};
  }

  CellGeom cell(int i, int j) const;

  // Mutable access for construction.
  Array2<double>& volfrac_array() { return volfrac_; }
  Array2<double>& areafrac_array(int dir) { return areafrac_[dir]; }
  Array2<double>& facecent_array(int dir) { return facecent_[dir]; }
  Array2<std::array<double, 2>>& centroid_array() { return centroid_; }
  Array2<std::array<double, 2>>& eb_centroid_array() { return eb_centroid_; }
  Array2<CellClass>& cls_array() { return cls_; }

  /// Recompute boundary length, normal and class of every cell in `region` from the face
  /// fractions, so that A_f n_f equals the face-area differences exactly.
  void finalize_boundary(const Box& region);

 private:
  friend class LevelGeometryBuilder;
  Box domain_{};
  Box box_{};
  double dx_ = 1.0;
  double dy_ = 1.0;
  Point origin_{};
  Array2<double> volfrac_;
  std::array<Array2<double>, 2> areafrac_;
  std::array<Array2<double>, 2> facecent_;
  Array2<std::array<double, 2>> centroid_;
  Array2<double> eb_area_;
  Array2<std::array<double, 2>> eb_normal_;
  Array2<std::array<double, 2>> eb_centroid_;
  Array2<CellClass> cls_;
};

/// Intersect the implicit boundary with the grid over `domain` grown by kGhost.
LevelGeometry build_geometry(const ImplicitFunction& fn, const Box& domain, double dx, double dy,
                             Point origin = {});

/// Volume/area-weighted restriction of `fine` by refinement ratio r.
LevelGeometry coarsen_geometry(const LevelGeometry& fine, int r);

/// Overwrite geometry outside the domain with the image of interior cells under the boundary
/// conditions: mirror for walls, zero-gradient copy for outflow, wrap for periodic.
void extend_geometry_ghosts(LevelGeometry& geom, const DomainBc& bc);

/// CSV: i,j,Λ,ax_lo,ax_hi,ay_lo,ay_hi,Af,nfx,nfy,class over the domain.
void write_geometry_csv(const LevelGeometry& geom, std::ostream& os);

const char* to_string(CellClass c);

}  // namespace ebamr
