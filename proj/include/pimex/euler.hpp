#pragma once

// 1D Euler equations: ALE Roe flux and wall ghost states. Templated on the
// scalar so the same formula yields values and exact derivatives.

#include "pimex/dual.hpp"
#include "pimex/types.hpp"

#include <array>
#include <cmath>
#include <string>

namespace pimex {

template <class T>
using State3 = std::array<T, 3>;

struct RoeOptions {
  double gamma = 1.4;
  /// Half-width of the smoothed |lambda| near zero, relative to the Roe
  /// sound speed. 0 gives the unmodified flux.
  double entropy_fix = 0.1;
};

template <class T>
T euler_pressure(const State3<T>& U, double gamma) {
  return (gamma - 1.0) * (U[2] - 0.5 * U[1] * U[1] / U[0]);
}

template <class T>
void require_admissible(const State3<T>& U, double gamma, const char* side) {
  const double rho = value_of(U[0]);
  const double p = value_of(euler_pressure(U, gamma));
  if (!(rho > 0.0) || !(p > 0.0)) {
    throw PhysicsError(std::string("non-positive density or pressure in ") + side +
                       " state (rho = " + std::to_string(rho) + ", p = " + std::to_string(p) + ")");
  }
}

/// Exact flux F(U) - v U.
template <class T>
State3<T> euler_flux(const State3<T>& U, const T& v, double gamma) {
  const T u = U[1] / U[0];
  const T p = euler_pressure(U, gamma);
  return {U[1] - v * U[0], U[1] * u + p - v * U[1], u * (U[2] + p) - v * U[2]};
}

template <class T>
T smoothed_abs(const T& x, const T& delta) {
  using std::abs;
  const T ax = abs(x);
  if (value_of(delta) <= 0.0 || value_of(ax) >= value_of(delta)) return ax;
  return (x * x + delta * delta) / (2.0 * delta);
}

/// Roe flux across a face moving with velocity v.
template <class T>
State3<T> ale_roe_flux(const State3<T>& UL, const State3<T>& UR, const T& v,
                       const RoeOptions& opt = {}) {
  using std::sqrt;
  using std::abs;
  const double g = opt.gamma;
  require_admissible(UL, g, "left");
  require_admissible(UR, g, "right");

  const T uL = UL[1] / UL[0], uR = UR[1] / UR[0];
  const T pL = euler_pressure(UL, g), pR = euler_pressure(UR, g);
  const T HL = (UL[2] + pL) / UL[0], HR = (UR[2] + pR) / UR[0];
  const T sL = sqrt(UL[0]), sR = sqrt(UR[0]);
  const T ut = (sL * uL + sR * uR) / (sL + sR);
  const T Ht = (sL * HL + sR * HR) / (sL + sR);
  const T rt = sL * sR;
  const T a2 = (g - 1.0) * (Ht - 0.5 * ut * ut);
  if (!(value_of(a2) > 0.0)) throw PhysicsError("Roe-averaged sound speed is not real");
  const T at = sqrt(a2);

  const T dp = pR - pL, du = uR - uL, drho = UR[0] - UL[0];
  const T alpha1 = (dp - rt * at * du) / (2.0 * a2);
  const T alpha2 = drho - dp / a2;
  const T alpha3 = (dp + rt * at * du) / (2.0 * a2);

  const T delta = opt.entropy_fix * at;
  const T l1 = smoothed_abs(T(ut - at - v), delta);
  const T l2 = smoothed_abs(T(ut - v), delta);
  const T l3 = smoothed_abs(T(ut + at - v), delta);

  const State3<T> FL = euler_flux(UL, v, g), FR = euler_flux(UR, v, g);
  const State3<T> r1{T(1.0), ut - at, Ht - ut * at};
  const State3<T> r2{T(1.0), ut, 0.5 * ut * ut};
  const State3<T> r3{T(1.0), ut + at, Ht + ut * at};
  State3<T> F;
  for (int k = 0; k < 3; ++k) {
    F[k] = 0.5 * (FL[k] + FR[k]) -
           0.5 * (l1 * alpha1 * r1[k] + l2 * alpha2 * r2[k] + l3 * alpha3 * r3[k]);
  }
  return F;
}

/// Mirror of U about a wall moving with velocity w: same density and
/// pressure, velocity 2w - u.
template <class T>
State3<T> wall_ghost(const State3<T>& U, const T& w, double gamma) {
  const T p = euler_pressure(U, gamma);
  const T ug = 2.0 * w - U[1] / U[0];
  return {U[0], U[0] * ug, p / (gamma - 1.0) + 0.5 * U[0] * ug * ug};
}

/// Roe flux on a fixed face (v = 0); plain-double convenience wrapper.
Eigen::Vector3d roe_flux_1d(const Eigen::Vector3d& UL, const Eigen::Vector3d& UR,
                            double gamma = 1.4, double entropy_fix = 0.0);

}  // namespace pimex
