#pragma once

#include <array>
#include <iosfwd>
#include <span>
#include <vector>

#include "ebamr/euler.hpp"
#include "ebamr/geometry.hpp"

namespace ebamr {

enum class MergeStrategy { normal, central };

/// Sparse per-cell index lists in compressed form over the level domain.
class CellLists {
 public:
  CellLists() = default;
  explicit CellLists(const Box& domain) : start_(domain, 0), count_(domain, 0) {}
  std::span<const IntVect> operator()(int i, int j) const {
    return {items_.data() + start_(i, j), static_cast<std::size_t>(count_(i, j))};
  }
  std::span<const double> values(int i, int j) const {
    return {vals_.data() + start_(i, j), static_cast<std::size_t>(count_(i, j))};
  }
  int count(int i, int j) const { return count_(i, j); }
  const Box& domain() const { return start_.box(); }

  void begin(int i, int j) { start_(i, j) = static_cast<int>(items_.size()); }
  void push(IntVect q, double v = 0.0) {
    items_.push_back(q);
    vals_.push_back(v);
  }
  void end(int i, int j) { count_(i, j) = static_cast<int>(items_.size()) - start_(i, j); }
  std::vector<double>& raw_values() { return vals_; }

 private:
  Array2<int> start_;
  Array2<int> count_;
  std::vector<IntVect> items_;
  std::vector<double> vals_;
};

/// M(p): members of the neighborhood of p (p first); W(p): cells whose neighborhood holds p.
struct NeighborhoodMap {
  MergeStrategy strategy = MergeStrategy::normal;
  CellLists members;
  CellLists owners;
  Array2<int> N;
};

struct Weights {
  Array2<double> alpha;
  Array2<double> beta;
};

/// Merge matrix A with rows indexed by neighborhood (owner cell) and columns by cell.
/// rows(R) lists (I, A_{R,I}) with R first; cols(I) lists (R, A_{R,I}).
struct MergeMatrix {
  CellLists rows;
  CellLists cols;
  Array2<double> vhat;
  Array2<std::array<double, 2>> xhat;
};

NeighborhoodMap build_neighborhoods(const LevelGeometry& geom, MergeStrategy strategy);
Weights compute_weights(const LevelGeometry& geom, const NeighborhoodMap& nb);
MergeMatrix assemble_merge_matrix(const LevelGeometry& geom, const NeighborhoodMap& nb, const Weights& w);

/// Everything WSRD needs for one level; static between regrids.
struct WsrdOperator {
  NeighborhoodMap nb;
  Weights w;
  MergeMatrix A;
};
WsrdOperator make_wsrd(const LevelGeometry& geom, MergeStrategy strategy);

struct WsrdOptions {
  bool gradients = true;
  bool limit = true;
  // With limit on, a neighborhood gradient is also scaled down until the reconstruction at every
  // member centroid has positive density and pressure for this gamma.
  double gamma = 1.4;
};

/// Neighborhood averages over `region`; Uhat must be valid on the members (region grown by 1).
Array2<State> neighborhood_averages(const Array2<State>& Uhat, const LevelGeometry& geom, const MergeMatrix& A,
                                    const Box& region);

/// Least-squares neighborhood gradients over `region` from Qhat known on `qvalid`.
std::array<Array2<State>, 2> neighborhood_gradients(const Array2<State>& Qhat, const LevelGeometry& geom,
                                                    const MergeMatrix& A, const Box& region, const Box& qvalid,
                                                    bool limit = true);

/// Scale each neighborhood gradient over `region` by the largest factor in [0, 1] that keeps the
/// reconstruction at every member centroid admissible (positive density and pressure).
void scale_for_positivity(std::array<Array2<State>, 2>& grad, const Array2<State>& Qhat, const LevelGeometry& geom,
                          const MergeMatrix& A, const Box& region, const Gas& gas);

/// Final update on `region` from neighborhood averages and gradients.
Array2<State> apply_wsrd(const Array2<State>& Uhat, const LevelGeometry& geom, const MergeMatrix& A,
                         const Array2<State>& Qhat, const std::array<Array2<State>, 2>& grad, const Box& region);

/// Intermediate data of one redistribution, kept for the synchronization bookkeeping.
struct WsrdResult {
  Array2<State> U;
  Array2<State> Qhat;
  std::array<Array2<State>, 2> grad;
};

/// Full redistribution of Uhat producing output on `region`. Uhat must be valid on region
/// grown by 4 (intersected with the domain).
WsrdResult redistribute(const Array2<State>& Uhat, const LevelGeometry& geom, const WsrdOperator& op,
                        const Box& region, const WsrdOptions& opt = {});

/// Triplets (row, col, value) with row-major linear indices over the domain.
void write_merge_matrix_csv(const MergeMatrix& A, std::ostream& os);

}  // namespace ebamr
