#pragma once

#include <iosfwd>
#include <vector>

#include "ebamr/godunov.hpp"

namespace ebamr {

class Hierarchy;
struct StepTotals;

/// Extensive rate gained by the fluid cells of `valid` outside `covered` through domain
/// boundary faces and the embedded boundary, from the fluxes used in the update.
State boundary_gain(const FaceFluxes& F, const LevelGeometry& geom, const Box& valid, const Box& covered);

struct LedgerRow {
  int step = 0;
  double time = 0.0;
  double dt = 0.0;
  State total{};      // composite totals after the step
  State change{};     // after - before
  State bflux{};      // boundary and embedded-boundary gain
  State sync{};       // change produced by synchronization
  State defect{};     // change - bflux
  State unapplied{};  // accumulated but unapplied register content
  State scale{};      // sum of V |U| per component, for relative measures
  double cf_mass = 0.0;
};

/// Per coarse step conservation record.
class ConservationLedger {
 public:
  ConservationLedger(bool refluxing, bool rerd) : refluxing_(refluxing), rerd_(rerd) {}
  const LedgerRow& record(int step, double time, double dt, const StepTotals& s, const State& scale);
  const std::vector<LedgerRow>& rows() const { return rows_; }
  /// Largest |defect_k| / scale_k over all rows and components.
  double max_relative_defect() const;
  void write_csv(std::ostream& os) const;

 private:
  bool refluxing_;
  bool rerd_;
  std::vector<LedgerRow> rows_;
};

/// Per-component magnitude over the composite cells: sum of V |rho|, V |E|, and V sqrt(2 rho E)
/// for both momentum components.
State composite_abs_totals(const Hierarchy& h);

struct ProfileSample {
  double s = 0.0;
  Prim w{};      // velocity rotated into the line frame: u along, v across
  Prim exact{0.0, 0.0, 0.0, 0.0};  // exact solution (zero if not requested)
  bool fluid = false;
};

/// Nearest-cell samples on the finest covering level along the line through `center` at angle
/// theta, at coordinates s in [s0, s1] with spacing ds.
std::vector<ProfileSample> centerline_profile(const Hierarchy& h, Point center, double theta, double s0, double s1,
                                              double ds);

/// Fill the exact columns from a Riemann problem centered at s = 0 at time t.
void attach_exact(std::vector<ProfileSample>& prof, const Prim& left, const Prim& right, double t, const Gas& gas);

/// Mean absolute density error over fluid samples with s in [a, b].
double l1_density_error(const std::vector<ProfileSample>& prof, double a, double b);

/// CSV: s,rho,u,v,p,T,exact_rho,exact_u,exact_p,exact_T with T = p / rho. Exact columns are zero
/// when no exact solution was attached.
void write_profile_csv(const std::vector<ProfileSample>& prof, std::ostream& os);

/// |grad rho| by central differences over fluid neighbors (one-sided next to the body), body cells 0.
Array2<double> schlieren(const ConsField& U, const LevelGeometry& geom, const Box& region);

/// CSV: i,j,x,y,vol_frac,rho,u,v,p for the fluid cells of a level's valid region.
void write_level_csv(const ConsField& U, const LevelGeometry& geom, const Box& valid, const Gas& gas,
                     std::ostream& os);

/// CSV: level,i,j,x,y,dx,schlieren over the composite: each level's valid cells not covered by a finer one.
void write_schlieren_csv(const Hierarchy& h, std::ostream& os);

}  // namespace ebamr
