#pragma once

#include <array>

#include "ebamr/box.hpp"
#include "ebamr/errors.hpp"
#include "ebamr/geometry.hpp"

namespace ebamr {

inline constexpr int kNcomp = 4;

/// Conserved state (rho, rho u, rho v, rho E); also used for fluxes and increments.
using State = std::array<double, kNcomp>;

using ConsField = Array2<State>;

struct Prim {
  double rho = 1.0;
  double u = 0.0;
  double v = 0.0;
  double p = 1.0;
};

struct Gas {
  double gamma = 1.4;
};

inline State& operator+=(State& a, const State& b) {
  for (int k = 0; k < kNcomp; ++k) a[k] += b[k];
  return a;
}
inline State& operator-=(State& a, const State& b) {
  for (int k = 0; k < kNcomp; ++k) a[k] -= b[k];
  return a;
}
inline State& operator*=(State& a, double s) {
  for (auto& x : a) x *= s;
  return a;
}
inline State operator+(State a, const State& b) { return a += b; }
inline State operator-(State a, const State& b) { return a -= b; }
inline State operator*(double s, State a) { return a *= s; }
inline State operator*(State a, double s) { return a *= s; }

Prim cons_to_prim(const State& U, const Gas& gas);
/// Positive density and pressure, finite components.
bool valid_state(const State& U, const Gas& gas);
State prim_to_cons(const Prim& W, const Gas& gas);
double sound_speed(const Prim& W, const Gas& gas);

/// Physical flux in direction dir (0 = x, 1 = y).
State flux(const State& U, int dir, const Gas& gas);
State flux(const Prim& W, int dir, const Gas& gas);

/// Star state of a one-dimensional Riemann problem; u is the normal velocity.
struct StarState {
  double p = 0.0;
  double u = 0.0;
};

/// Two-shock approximate star state. Inputs are in the normal frame (u normal, v tangential).
StarState two_shock_star(const Prim& L, const Prim& R, const Gas& gas);

/// Godunov state at x/t = 0 from the two-shock approximation, in the normal frame.
Prim two_shock_sample(const Prim& L, const Prim& R, const Gas& gas);

/// Interface flux in direction dir from left/right primitive states (lab frame).
State riemann_two_shock(const Prim& L, const Prim& R, int dir, const Gas& gas);

/// Iterative exact solution of the one-dimensional Riemann problem (normal frame).
class ExactRiemann {
 public:
  ExactRiemann(const Prim& L, const Prim& R, const Gas& gas);
  double pstar() const { return pstar_; }
  double ustar() const { return ustar_; }
  int iterations() const { return iterations_; }
  /// Self-similar solution at xi = x / t.
  Prim sample(double xi) const;

 private:
  Prim L_, R_;
  Gas gas_;
  double pstar_ = 0.0, ustar_ = 0.0;
  int iterations_ = 0;
};

/// Pressure on a slip wall with outward (fluid-to-wall) normal velocity w from a symmetric
/// reflected two-shock problem.
double wall_pressure(double rho, double p, double w, const Gas& gas);

/// Slip-wall flux on a boundary with unit normal n pointing from the body into the fluid:
/// (0, p n_x, p n_y, 0).
State eb_wall_flux(const State& U, const std::array<double, 2>& n, const Gas& gas);

/// Largest |u|+c or |v|+c over fluid cells of `region`.
double max_wavespeed(const ConsField& U, const LevelGeometry& geom, const Box& region, const Gas& gas);

}  // namespace ebamr
