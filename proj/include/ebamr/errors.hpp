#pragma once

#include <sstream>
#include <stdexcept>
#include <string>

#include "ebamr/box.hpp"

namespace ebamr {

/// Failure inside the flow solver, tagged with where it happened when known.
class SolverError : public std::runtime_error {
 public:
  enum class Kind {
    NegativePressure,
    NegativeDensity,
    Vacuum,
    NoConvergence,
    EmptyFluid,
    InsufficientVolume,
    NegativeStateAfterSync,
    Internal,
  };

  SolverError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind), msg_(what) {}

  Kind kind() const { return kind_; }
  int level() const { return level_; }
  int step() const { return step_; }
  bool has_cell() const { return has_cell_; }
  IntVect cell() const { return cell_; }

  SolverError& at_cell(IntVect c) {
    if (!has_cell_) {
      has_cell_ = true;
      cell_ = c;
    }
    return *this;
  }
  SolverError& at_level(int l) {
    if (level_ < 0) level_ = l;
    return *this;
  }
  SolverError& at_step(int s) {
    if (step_ < 0) step_ = s;
    return *this;
  }

  const char* what() const noexcept override {
    std::ostringstream os;
    os << msg_;
    if (level_ >= 0) os << " [level " << level_ << "]";
    if (step_ >= 0) os << " [step " << step_ << "]";
    if (has_cell_) os << " [cell (" << cell_.i << "," << cell_.j << ")]";
    full_ = os.str();
    return full_.c_str();
  }

 private:
  Kind kind_;
  std::string msg_;
  int level_ = -1;
  int step_ = -1;
  bool has_cell_ = false;
  IntVect cell_{};
  mutable std::string full_;
};

const char* to_string(SolverError::Kind k);

}  // namespace ebamr
