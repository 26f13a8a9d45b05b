#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "ebamr/frd.hpp"
#include "ebamr/wsrd.hpp"

namespace ebamr {

/// Per coarse cell redistribution mismatch for one coarse/fine interface. Contributions from
/// fine ghost cells are folded onto the coarse cell underneath as they are accumulated.
struct RedistRegister {
  Box covered;  // coarse cells under the fine valid region
  Box domain;   // coarse domain
  Box window;   // coarse cells that can hold a correction
  Array2<State> dR_coarse;
  Array2<State> dR_fine;

  RedistRegister() = default;
  RedistRegister(const Box& covered, const Box& domain);
  void reset();
};

/// Sparse coefficients K with R(p,q) = K(p,q) * Uhat_q, i.e.
/// K = Diag(V) A^T Diag(Vhat)^-1 A Diag(V), for the rows in `rows`.
struct RedistMatrix {
  CellLists K;
};
RedistMatrix build_R_matrix(const MergeMatrix& A, const LevelGeometry& geom, const Box& rows);

/// Row sum of R for cell p (the extensive gradient-free final update of p).
State R_row_sum(const RedistMatrix& R, const ConsField& Uhat, IntVect p);

/// Coarse side: for each uncovered cell u, weight * sum over covered c of R(c,u) - R(u,c).
void accumulate_wsrd_coarse(RedistRegister& reg, const LevelGeometry& geom, const MergeMatrix& A,
                            const ConsField& Uhat, double weight);

/// Fine side: for each fine ghost cell g (outside `valid`), weight * sum over valid v of
/// R(g,v) - R(v,g), added to the coarse cell under g.
void accumulate_wsrd_fine(RedistRegister& reg, const LevelGeometry& geom, const MergeMatrix& A,
                          const ConsField& Uhat, const Box& valid, double weight);

/// Slope contributions with the gradients held fixed, coarse and fine analogs.
void accumulate_gradient_terms_coarse(RedistRegister& reg, const LevelGeometry& geom, const MergeMatrix& A,
                                      const std::array<Array2<State>, 2>& grad, double weight);
void accumulate_gradient_terms_fine(RedistRegister& reg, const LevelGeometry& geom, const MergeMatrix& A,
                                    const std::array<Array2<State>, 2>& grad, const Box& valid, double weight);

/// Flux redistribution transfers (extensive rates) scaled by `scale` (stage weight times dt).
void accumulate_frd_coarse(RedistRegister& reg, const std::vector<Transfer>& transfers, double scale);
void accumulate_frd_fine(RedistRegister& reg, const std::vector<Transfer>& transfers, const Box& valid,
                         double scale);

/// dR_coarse + dR_fine over the window.
Array2<State> combine(const RedistRegister& reg);

/// Called for every covered coarse cell that receives an intensive increment.
using CoveredInjection = std::function<void(IntVect, const State&)>;

/// Stabilized application of the extensive corrections dRbold (on the register window):
/// Lambda = 1 cells take all of it, cut cells keep Lambda * dRbold and spread the rest over their
/// monotone-path neighborhood with weight 1 / V_nbh. Covered recipients are also passed to `inject`.
/// Throws NegativeStateAfterSync if a touched coarse cell ends up invalid.
void apply_sync(ConsField& U, const LevelGeometry& geom, const FrdNeighborhoods& nbhd, const Array2<State>& dRbold,
                const Box& covered, const CoveredInjection& inject, const Gas& gas);

/// Register dump: I,J,component,dR_coarse,dR_fine,dF,dRbold for cells with any nonzero entry.
void write_register_csv(const RedistRegister& reg, const Array2<State>& dF_cell, const Array2<State>& dRbold,
                        std::ostream& os);

}  // namespace ebamr
