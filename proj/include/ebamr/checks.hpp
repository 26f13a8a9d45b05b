#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ebamr/config.hpp"

namespace ebamr {

/// One property check: pass if value <= tol unless stated otherwise in `detail`.
struct CheckResult {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double tol = 0.0;
  std::string detail;
};

void print_check(std::ostream& os, const CheckResult& r);

/// Largest relative per-step defect of a run against tol.
CheckResult check_conservation(const std::string& name, const RunConfig& c, double tol = 1e-12);

/// With rerd off: |defect + unapplied| per step against tol, and the cumulative ratio of
/// |mass defect| to the coarse/fine mass flux against max_ratio.
CheckResult check_defect_attribution(const std::string& name, const RunConfig& c, double tol = 1e-12,
                                     double max_ratio = 0.05);

/// Merge-matrix column sums on randomized cut meshes. `corrupt` perturbs one entry first.
CheckResult check_column_sums(int trials, bool corrupt = false);
/// Matrix-free redistribution against the dense A^T Diag(Vhat)^-1 A evaluation on small meshes.
CheckResult check_dense_agreement(int trials);
/// Conservation of the redistribution, gradients on and off.
CheckResult check_wsrd_conservation(int trials);
/// Linear data is reproduced with the limiter off.
CheckResult check_linearity(int trials);
/// All-regular mesh: bit-exact identity.
CheckResult check_regular_identity();
/// Gradient-free R-matrix row sums against the redistribution output.
CheckResult check_row_sums(int trials);

/// Shift the channel so that the cell left of node (i, j) of the base level gets volume
/// fraction `lambda` from the upper wall. Returns the adjusted config.
RunConfig place_sliver(const RunConfig& c, int i, int j, double lambda);
/// Smallest volume fraction of the uncovered base-level cut cells, and its cell.
double min_uncovered_fraction(const RunConfig& c, IntVect* where = nullptr);

/// A base-level cut cell of fraction 1e-8 away from the coarse/fine boundary: runs `steps`
/// steps without an invalid state.
CheckResult check_small_cell(const RunConfig& base, int steps = 100, double cfl = 0.4);
/// A base-level cut cell of fraction below 1e-4 next to the coarse/fine boundary: the run must
/// stop with a reported solver error carrying level, step and cell.
CheckResult check_pathological(const RunConfig& base, int steps = 100);

/// Uniform flow along the channel for `steps` coarse steps: max change in any fluid cell.
CheckResult check_free_stream(const RunConfig& base, int steps = 10, double tol = 1e-12);

/// Shock-cylinder run with partial refinement against a companion whose refined levels cover
/// the partial ones: completion, relative L1 density difference over the partially refined
/// composite cells, and the conservation ledger.
std::vector<CheckResult> check_cylinder(const RunConfig& partial, const RunConfig& full, double tol = 0.05);

struct ValidateOptions {
  bool rerd = true;             // off: the conservation checks are expected to fail
  bool corrupt_matrix = false;  // perturb one merge-matrix entry before the column-sum check
  int trials = 50;
};
/// Property checks that run in a few minutes: conservation for the three schemes, merge-matrix
/// identities, small-cell stability and free stream.
std::vector<CheckResult> validate_suite(const ValidateOptions& opt, std::ostream* progress = nullptr);

struct SodStudy {
  std::vector<int> n;
  std::vector<double> l1;
  std::vector<double> order;
  std::vector<double> defect;
};
SodStudy sod_study(const RunConfig& base, const std::vector<int>& resolutions);

}  // namespace ebamr
