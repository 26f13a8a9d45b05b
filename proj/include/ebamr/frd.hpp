#pragma once

#include <vector>

#include "ebamr/euler.hpp"
#include "ebamr/geometry.hpp"

namespace ebamr {

/// Fluid cells of the 3x3 box around (i,j), inside the domain, reachable from (i,j) by a
/// monotone path that crosses open faces only. The cell itself comes first.
std::vector<IntVect> monotone_path_neighbors(const LevelGeometry& geom, int i, int j);

/// Per-cell monotone-path neighborhoods over the level domain.
class FrdNeighborhoods {
 public:
  FrdNeighborhoods() = default;
  explicit FrdNeighborhoods(const LevelGeometry& geom);

  const std::vector<IntVect>& operator()(int i, int j) const { return sets_[index_(i, j)]; }
  const Box& domain() const { return domain_; }
  /// Sum of fluid volume over the neighborhood of (i,j).
  double volume(int i, int j) const { return vol_(i, j); }

 private:
  Box domain_{};
  Array2<int> index_;
  std::vector<std::vector<IntVect>> sets_;
  Array2<double> vol_;
};

FrdNeighborhoods build_frd_neighborhoods(const LevelGeometry& geom);

/// Lambda-weighted average of dUc over the neighborhood, for the cut cells of `region`.
Array2<State> nonconservative_update(const Array2<State>& dUc, const LevelGeometry& geom,
                                     const FrdNeighborhoods& nbhd, const Box& region);

/// One extensive transfer dM from a cut cell to a member of its neighborhood.
struct Transfer {
  IntVect src;
  IntVect dst;
  State amount;  // extensive (already multiplied by the recipient's share)
};

struct FrdResult {
  Array2<State> dU;                // stabilized rate
  std::vector<Transfer> transfers;  // row-major over sources
};

/// Flux redistribution of the rate dUc. Cut cells of `sources` redistribute their excess over
/// their neighborhoods; the result is valid on `sources` shrunk by one plus anything it reaches.
/// With density weighting the shares are rho V / sum(rho V) instead of V / sum(V).
FrdResult frd_apply(const Array2<State>& dUc, const LevelGeometry& geom, const FrdNeighborhoods& nbhd,
                    const Box& sources, const ConsField* density_weights = nullptr);

}  // namespace ebamr
