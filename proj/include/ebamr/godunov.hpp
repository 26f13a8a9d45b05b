#pragma once

#include <array>

#include "ebamr/euler.hpp"
#include "ebamr/geometry.hpp"

namespace ebamr {

/// Primitive variables (rho, u, v, p) stored in a State-shaped vector for arithmetic.
using PrimField = Array2<State>;

inline State to_vec(const Prim& W) { return {W.rho, W.u, W.v, W.p}; }
inline Prim to_prim(const State& w) { return {w[0], w[1], w[2], w[3]}; }

/// Face-centered fluxes per unit face length. f[d] is indexed by the low-side cell of a face
/// normal to d; eb holds the wall flux F^f of each cut cell.
struct FaceFluxes {
  std::array<Array2<State>, 2> f;
  Array2<State> eb;
};

/// States on the low (left) and high (right) side of each face normal to d.
struct FaceStates {
  std::array<Array2<State>, 2> left;
  std::array<Array2<State>, 2> right;
};

/// Primitive variables of the fluid cells of `region`; body cells are left untouched.
PrimField primitive_field(const ConsField& U, const LevelGeometry& geom, const Box& region, const Gas& gas);

/// Limited slopes in direction dir over `region`. order 4 uses the fourth-order
/// monotonized-central slope when the 5-point stencil crosses no closed face, falling back to
/// the second-order one on a clean 3-point stencil, else zero. order 2 skips the first tier.
Array2<State> slopes(const PrimField& W, const LevelGeometry& geom, int dir, const Box& region, int order = 4);

/// Face flux from two primitive states, honoring wall boundaries of the domain.
State face_flux(const State& WL, const State& WR, int dir, int i, int j, const LevelGeometry& geom,
                const DomainBc& bc, const Gas& gas);

/// Half-step characteristic-traced face states with the gated transverse correction.
/// Faces of `region` are filled on both sides.
FaceStates predict_faces(const ConsField& U, const PrimField& W, const std::array<Array2<State>, 2>& dW,
                         double dt, const LevelGeometry& geom, const DomainBc& bc, const Box& region,
                         const Gas& gas);

/// Riemann fluxes on open faces of `region` (and its tangential neighbors) plus wall fluxes of
/// the cut cells of `region`.
FaceFluxes compute_fluxes(const FaceStates& s, const ConsField& U, const LevelGeometry& geom, const DomainBc& bc,
                          const Box& region, const Gas& gas);

/// Move each partially open face's flux from the face center to its centroid.
void centroid_correct_fluxes(FaceFluxes& F, const LevelGeometry& geom, const Box& region);

/// dU/dt of the cut-cell finite-volume update; zero in body cells.
Array2<State> conservative_update(const FaceFluxes& F, const LevelGeometry& geom, const Box& region);

/// Single-step unsplit Godunov rate dU/dt over `region` and the fluxes that produced it.
struct RateResult {
  Array2<State> dU;
  FaceFluxes fluxes;
};
RateResult godunov_rate(const ConsField& U, double dt, const LevelGeometry& geom, const DomainBc& bc,
                        const Box& region, const Gas& gas);

/// Second-order MUSCL rate (no tracing, no transverse terms) used by the method of lines.
RateResult muscl_rate(const ConsField& U, const LevelGeometry& geom, const DomainBc& bc, const Box& region,
                      const Gas& gas);

}  // namespace ebamr
