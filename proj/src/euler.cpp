#include "ebamr/euler.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ebamr {

const char* to_string(SolverError::Kind k) {
  switch (k) {
    case SolverError::Kind::NegativePressure: return "NegativePressure";
    case SolverError::Kind::NegativeDensity: return "NegativeDensity";
    case SolverError::Kind::Vacuum: return "Vacuum";
    case SolverError::Kind::NoConvergence: return "NoConvergence";
    case SolverError::Kind::EmptyFluid: return "EmptyFluid";
    case SolverError::Kind::InsufficientVolume: return "InsufficientVolume";
    case SolverError::Kind::NegativeStateAfterSync: return "NegativeStateAfterSync";
    case SolverError::Kind::Internal: return "Internal";
  }
  return "?";
}

Prim cons_to_prim(const State& U, const Gas& gas) {
  if (!(U[0] > 0.0)) {
    std::ostringstream os;
    os << "negative density " << U[0];
    throw SolverError(SolverError::Kind::NegativeDensity, os.str());
  }
  Prim W;
  W.rho = U[0];
  W.u = U[1] / U[0];
  W.v = U[2] / U[0];
  W.p = (gas.gamma - 1.0) * (U[3] - 0.5 * (U[1] * W.u + U[2] * W.v));
  if (!(W.p > 0.0)) {
    std::ostringstream os;
    os << "negative pressure " << W.p << " (energy " << U[3] << ")";
    throw SolverError(SolverError::Kind::NegativePressure, os.str());
  }
  return W;
}

bool valid_state(const State& U, const Gas& gas) {
  for (double x : U) {
    if (!std::isfinite(x)) return false;
  }
  if (!(U[0] > 0.0)) return false;
  return (gas.gamma - 1.0) * (U[3] - 0.5 * (U[1] * U[1] + U[2] * U[2]) / U[0]) > 0.0;
}

State prim_to_cons(const Prim& W, const Gas& gas) {
  return {W.rho, W.rho * W.u, W.rho * W.v, W.p / (gas.gamma - 1.0) + 0.5 * W.rho * (W.u * W.u + W.v * W.v)};
}

double sound_speed(const Prim& W, const Gas& gas) { return std::sqrt(gas.gamma * W.p / W.rho); }

State flux(const Prim& W, int dir, const Gas& gas) {
  const double un = dir == 0 ? W.u : W.v;
  const double E = W.p / (gas.gamma - 1.0) + 0.5 * W.rho * (W.u * W.u + W.v * W.v);
  State F{W.rho * un, W.rho * W.u * un, W.rho * W.v * un, un * (E + W.p)};
  F[1 + dir] += W.p;
  return F;
}

State flux(const State& U, int dir, const Gas& gas) { return flux(cons_to_prim(U, gas), dir, gas); }

namespace {

void check_vacuum(const Prim& L, const Prim& R, double cL, double cR, const Gas& gas) {
  if (R.u - L.u >= 2.0 * (cL + cR) / (gas.gamma - 1.0)) {
    std::ostringstream os;
    os << "vacuum generated by Riemann data (uL=" << L.u << ", uR=" << R.u << ")";
    throw SolverError(SolverError::Kind::Vacuum, os.str());
  }
}

/// Shock mass flux for a wave into state K at star pressure p.
double shock_w(double p, double pk, double ck_lag, double g) {
  return ck_lag * std::sqrt(1.0 + (g + 1.0) / (2.0 * g) * (p / pk - 1.0));
}

}  // namespace

StarState two_shock_star(const Prim& L, const Prim& R, const Gas& gas) {
  const double g = gas.gamma;
  const double cL = sound_speed(L, gas), cR = sound_speed(R, gas);
  check_vacuum(L, R, cL, cR, gas);
  const double CL = L.rho * cL, CR = R.rho * cR;
  double p = (CR * L.p + CL * R.p + CL * CR * (L.u - R.u)) / (CL + CR);
  const double e = (g - 1.0) / (2.0 * g);
  // Two-rarefaction pressure: a positive fallback when the linearization fails.
  const double p_rr = std::pow((cL + cR - 0.5 * (g - 1.0) * (R.u - L.u)) /
                                   (cL / std::pow(L.p, e) + cR / std::pow(R.p, e)),
                               1.0 / e);
  if (!(p > 0.0)) p = p_rr;
  double uL = L.u, uR = R.u, ZL = CL, ZR = CR;
  for (int it = 0; it < 2; ++it) {
    const double WL = shock_w(p, L.p, CL, g), WR = shock_w(p, R.p, CR, g);
    ZL = 2.0 * WL * WL * WL / (WL * WL + CL * CL);
    ZR = 2.0 * WR * WR * WR / (WR * WR + CR * CR);
    uL = L.u - (p - L.p) / WL;
    uR = R.u + (p - R.p) / WR;
    const double pn = p - ZL * ZR * (uR - uL) / (ZL + ZR);
    p = pn > 0.0 ? pn : p_rr;
  }
  const double WL = shock_w(p, L.p, CL, g), WR = shock_w(p, R.p, CR, g);
  uL = L.u - (p - L.p) / WL;
  uR = R.u + (p - R.p) / WR;
  return {p, (ZL * uL + ZR * uR) / (ZL + ZR)};
}

Prim two_shock_sample(const Prim& L, const Prim& R, const Gas& gas) {
  const double g = gas.gamma;
  const StarState s = two_shock_star(L, R, gas);
  const bool left = s.u >= 0.0;
  const Prim& K = left ? L : R;
  const double sgn = left ? 1.0 : -1.0;  // mirror the right wave onto the left configuration
  const double ck = sound_speed(K, gas);
  const double uk = sgn * K.u, us = sgn * s.u;
  Prim out;
  if (s.p > K.p) {
    const double Ck = K.rho * ck;
    const double W = shock_w(s.p, K.p, Ck, g);
    const double speed = uk - W / K.rho;
    if (speed >= 0.0) return K;
    out.rho = 1.0 / (1.0 / K.rho - (s.p - K.p) / (W * W));
    out.u = us;
    out.p = s.p;
  } else {
    const double rho_s = K.rho * std::pow(s.p / K.p, 1.0 / g);
    const double c_s = std::sqrt(g * s.p / rho_s);
    const double head = uk - ck, tail = us - c_s;
    if (head >= 0.0) return K;
    if (tail <= 0.0) {
      out.rho = rho_s;
      out.u = us;
      out.p = s.p;
    } else {
      const double c = 2.0 / (g + 1.0) * (ck + 0.5 * (g - 1.0) * uk);
      out.rho = K.rho * std::pow(c / ck, 2.0 / (g - 1.0));
      out.u = c;
      out.p = K.p * std::pow(c / ck, 2.0 * g / (g - 1.0));
    }
  }
  out.u *= sgn;
  out.v = K.v;
  return out;
}

State riemann_two_shock(const Prim& L, const Prim& R, int dir, const Gas& gas) {
  auto to_normal = [dir](const Prim& W) { return dir == 0 ? W : Prim{W.rho, W.v, W.u, W.p}; };
  Prim s = two_shock_sample(to_normal(L), to_normal(R), gas);
  if (dir == 1) std::swap(s.u, s.v);
  return flux(s, dir, gas);
}

ExactRiemann::ExactRiemann(const Prim& L, const Prim& R, const Gas& gas) : L_(L), R_(R), gas_(gas) {
  const double g = gas.gamma;
  const double cL = sound_speed(L, gas), cR = sound_speed(R, gas);
  check_vacuum(L, R, cL, cR, gas);
  auto fk = [g](double p, const Prim& K, double ck, double& df) {
    if (p > K.p) {
      const double A = 2.0 / ((g + 1.0) * K.rho), B = (g - 1.0) / (g + 1.0) * K.p;
      const double q = std::sqrt(A / (p + B));
      df = q * (1.0 - 0.5 * (p - K.p) / (p + B));
      return (p - K.p) * q;
    }
    const double r = std::pow(p / K.p, (g - 1.0) / (2.0 * g));
    df = r / (K.rho * ck) * K.p / p;
    return 2.0 * ck / (g - 1.0) * (r - 1.0);
  };
  const double du = R.u - L.u;
  // Primitive-variable guess, bounded below by a fraction of the smaller pressure.
  double p = std::max(0.5 * (L.p + R.p) - 0.125 * du * (L.rho + R.rho) * (cL + cR), 1e-8 * std::min(L.p, R.p));
  for (iterations_ = 1; iterations_ <= 100; ++iterations_) {
    double dL = 0.0, dR = 0.0;
    const double f = fk(p, L, cL, dL) + fk(p, R, cR, dR) + du;
    double pn = p - f / (dL + dR);
    if (pn <= 0.0) pn = 0.5 * p;
    const double change = std::abs(pn - p);
    p = pn;
    if (change < 1e-12 * std::max(1.0, p)) {
      double dl = 0.0, dr = 0.0;
      pstar_ = p;
      ustar_ = 0.5 * (L.u + R.u) + 0.5 * (fk(p, R, cR, dr) - fk(p, L, cL, dl));
      return;
    }
  }
  throw SolverError(SolverError::Kind::NoConvergence, "exact Riemann iteration did not converge");
}

Prim ExactRiemann::sample(double xi) const {
  const double g = gas_.gamma;
  const bool left = xi <= ustar_;
  const Prim& K = left ? L_ : R_;
  const double s = left ? 1.0 : -1.0;  // mirror right waves
  const double ck = sound_speed(K, gas_);
  const double x = s * xi, uk = s * K.u, us = s * ustar_;
  Prim out;
  if (pstar_ > K.p) {
    const double ratio = pstar_ / K.p;
    const double speed = uk - ck * std::sqrt((g + 1.0) / (2.0 * g) * ratio + (g - 1.0) / (2.0 * g));
    if (x <= speed) return K;
    out.rho = K.rho * (ratio + (g - 1.0) / (g + 1.0)) / ((g - 1.0) / (g + 1.0) * ratio + 1.0);
    out.u = us;
    out.p = pstar_;
  } else {
    const double c_s = ck * std::pow(pstar_ / K.p, (g - 1.0) / (2.0 * g));
    if (x <= uk - ck) return K;
    if (x >= us - c_s) {
      out.rho = K.rho * std::pow(pstar_ / K.p, 1.0 / g);
      out.u = us;
      out.p = pstar_;
    } else {
      const double c = 2.0 / (g + 1.0) * (ck + 0.5 * (g - 1.0) * (uk - x));
      out.u = c + x;
      out.rho = K.rho * std::pow(c / ck, 2.0 / (g - 1.0));
      out.p = K.p * std::pow(c / ck, 2.0 * g / (g - 1.0));
    }
  }
  out.u *= s;
  out.v = K.v;
  return out;
}

double wall_pressure(double rho, double p, double w, const Gas& gas) {
  if (w == 0.0) return p;
  const Prim L{rho, w, 0.0, p};
  const Prim R{rho, -w, 0.0, p};
  return two_shock_star(L, R, gas).p;
}

State eb_wall_flux(const State& U, const std::array<double, 2>& n, const Gas& gas) {
  const Prim W = cons_to_prim(U, gas);
  // Velocity toward the wall is along -n.
  const double w = -(W.u * n[0] + W.v * n[1]);
  const double pw = wall_pressure(W.rho, W.p, w, gas);
  return {0.0, pw * n[0], pw * n[1], 0.0};
}

double max_wavespeed(const ConsField& U, const LevelGeometry& geom, const Box& region, const Gas& gas) {
  double smax = -1.0;
  for_each_cell(region, [&](int i, int j) {
    if (!geom.is_fluid(i, j)) return;
    Prim W;
    try {
      W = cons_to_prim(U(i, j), gas);
    } catch (SolverError& e) {
      e.at_cell({i, j});
      throw;
    }
    const double c = sound_speed(W, gas);
    smax = std::max({smax, std::abs(W.u) + c, std::abs(W.v) + c});
  });
  if (smax < 0.0) throw SolverError(SolverError::Kind::EmptyFluid, "no fluid cells in region");
  return smax;
}

}  // namespace ebamr
