#pragma once

#include <algorithm>
#include <array>
#include <cassert>
#include <cstddef>
#include <ostream>
#include <vector>

namespace ebamr {

/// Integer cell index in 2D.
struct IntVect {
  int i = 0;
  int j = 0;

  constexpr int operator[](int d) const { return d == 0 ? i : j; }
  constexpr int& operator[](int d) { return d == 0 ? i : j; }
  friend constexpr bool operator==(IntVect, IntVect) = default;
  friend constexpr IntVect operator+(IntVect a, IntVect b) { return {a.i + b.i, a.j + b.j}; }
  friend constexpr IntVect operator-(IntVect a, IntVect b) { return {a.i - b.i, a.j - b.j}; }
};

inline constexpr int floor_div(int a, int r) { return a >= 0 ? a / r : -((-a + r - 1) / r); }

inline constexpr IntVect coarsen(IntVect p, int r) { return {floor_div(p.i, r), floor_div(p.j, r)}; }

inline constexpr IntVect unit(int dir) { return dir == 0 ? IntVect{1, 0} : IntVect{0, 1}; }

/// Inclusive cell-index rectangle. An empty box has lo > hi in some direction.
struct Box {
  IntVect lo{0, 0};
  IntVect hi{-1, -1};

  constexpr Box() = default;
  constexpr Box(IntVect l, IntVect h) : lo(l), hi(h) {}

  constexpr bool empty() const { return hi.i < lo.i || hi.j < lo.j; }
  constexpr int length(int d) const { return hi[d] - lo[d] + 1; }
  constexpr std::size_t num_cells() const {
    return empty() ? 0 : static_cast<std::size_t>(length(0)) * static_cast<std::size_t>(length(1));
  }
  constexpr bool contains(IntVect p) const {
    return p.i >= lo.i && p.i <= hi.i && p.j >= lo.j && p.j <= hi.j;
  }
  constexpr bool contains(int i, int j) const { return contains(IntVect{i, j}); }
  constexpr bool contains(const Box& b) const { return b.empty() || (contains(b.lo) && contains(b.hi)); }

  constexpr Box grow(int n) const { return {{lo.i - n, lo.j - n}, {hi.i + n, hi.j + n}}; }
  constexpr Box grow(int dir, int n) const {
    Box b = *this;
    b.lo[dir] -= n;
    b.hi[dir] += n;
    return b;
  }
  /// Box of faces normal to `dir` bounding this box's cells.
  constexpr Box faces(int dir) const {
    Box b = *this;
    b.hi[dir] += 1;
    return b;
  }
  constexpr Box refine(int r) const {
    return {{lo.i * r, lo.j * r}, {(hi.i + 1) * r - 1, (hi.j + 1) * r - 1}};
  }
  constexpr Box coarsen(int r) const {
    return {{floor_div(lo.i, r), floor_div(lo.j, r)}, {floor_div(hi.i, r), floor_div(hi.j, r)}};
  }
  constexpr Box intersect(const Box& o) const {
    return {{std::max(lo.i, o.lo.i), std::max(lo.j, o.lo.j)},
            {std::min(hi.i, o.hi.i), std::min(hi.j, o.hi.j)}};
  }
  friend constexpr bool operator==(const Box&, const Box&) = default;
};

inline std::ostream& operator<<(std::ostream& os, const Box& b) {
  return os << "[(" << b.lo.i << "," << b.lo.j << ")-(" << b.hi.i << "," << b.hi.j << ")]";
}

/// Dense row-major (i fastest) 2D array over an index box.
template <typename T>
class Array2 {
 public:
  Array2() = default;
  explicit Array2(const Box& box, const T& init = T{}) : box_(box), nx_(box.length(0)), data_(box.num_cells(), init) {}

  const Box& box() const { return box_; }
  std::size_t size() const { return data_.size(); }

  std::size_t index(int i, int j) const {
    assert(box_.contains(i, j));
    return static_cast<std::size_t>(j - box_.lo.j) * static_cast<std::size_t>(nx_) +
           static_cast<std::size_t>(i - box_.lo.i);
  }
  T& operator()(int i, int j) { return data_[index(i, j)]; }
  const T& operator()(int i, int j) const { return data_[index(i, j)]; }
  T& operator()(IntVect p) { return (*this)(p.i, p.j); }
  const T& operator()(IntVect p) const { return (*this)(p.i, p.j); }

  void fill(const T& v) { std::fill(data_.begin(), data_.end(), v); }
  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

 private:
  Box box_{};
  int nx_ = 0;
  std::vector<T> data_;
};

template <typename F>
void for_each_cell(const Box& b, F&& f) {
  for (int j = b.lo.j; j <= b.hi.j; ++j) {
    for (int i = b.lo.i; i <= b.hi.i; ++i) f(i, j);
  }
}

}  // namespace ebamr
