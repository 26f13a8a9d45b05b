#pragma once

#include <array>

#include "ebamr/godunov.hpp"

namespace ebamr {

/// Extensive flux mismatch on the coarse faces of a coarse/fine boundary. Each entry holds the
/// amount to add to the uncovered coarse cell next to the face.
struct FluxRegister {
  Box covered;  // coarse cells under the fine valid region
  Box domain;   // coarse domain
  std::array<Array2<State>, 2> dF;
  double cf_mass = 0.0;  // sum over faces and calls of |fine-side extensive mass flux|

  FluxRegister() = default;
  FluxRegister(const Box& covered, const Box& domain);
  void reset();

  /// A coarse face between a covered and an uncovered cell, both inside the domain.
  bool is_cf_face(int d, int i, int j) const;
  /// +1 if the uncovered cell is on the high side of the face, -1 otherwise.
  int orientation(int d, int i, int j) const;
  IntVect uncovered_cell(int d, int i, int j) const;
};

/// Adds -scale * A F (oriented) for every coarse/fine face.
void accumulate_coarse(FluxRegister& reg, const FaceFluxes& F, const LevelGeometry& coarse, double scale);

/// Adds +scale * sum of A F over the two fine faces covering each coarse/fine face (oriented).
void accumulate_fine(FluxRegister& reg, const FaceFluxes& F, const LevelGeometry& fine, double scale);

/// Per coarse cell sum of the register over its coarse/fine faces, on `covered` grown by one.
Array2<State> reflux_by_cell(const FluxRegister& reg);

}  // namespace ebamr
