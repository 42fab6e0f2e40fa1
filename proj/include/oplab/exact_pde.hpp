#pragma once

#include "oplab/grid.hpp"
#include "oplab/types.hpp"

namespace oplab {

inline constexpr Real euler_gamma_gas = 1.4;

/// Square wave h * 1_{[-w/2, w/2]}(x - xi), periodically extended.
struct BoxWaveParams {
  Real height = 1.0;
  Real width = 1.0;
  Real center = 0.0;
};

/// Sample the box wave on a grid; edge points (distance exactly w/2) count as inside.
GridFunction sample_box_wave(const BoxWaveParams& params, const Grid& grid);

/// Exact constant-speed advection of a box wave: samples the translate by a*t.
GridFunction advect_exact(const BoxWaveParams& params, Real speed, Real t, const Grid& grid);

/// Shock-interval endpoint for Burgers with -sin initial data:
/// 0 for t <= 1, else the root of x = t sin(x) in (0, pi), to 1e-12.
Real burgers_xt(Real t);

/// Inverse of Psi_t(x0) = x0 - t sin(x0) on [x_t, 2pi - x_t], by bisection.
/// Requires x in [0, 2pi]; the residual |Psi_t(x0) - x| is below 1e-12.
Real psi_inverse(Real x, Real t);

/// Entropy solution of Burgers' equation with initial data -sin(x - xi) on the
/// 2pi-periodic domain, via characteristics. At x == xi the right branch is taken.
GridFunction burgers_exact(Real xi, Real t, const Grid& grid);

/// First-order Godunov finite-volume solver for Burgers' equation, periodic.
GridFunction burgers_fvm(const GridFunction& u0, Real t_final, Real cfl = 0.45);

enum class Boundary { periodic, transmissive };

/// Conservative variables of 1D compressible Euler (v = 0): density, momentum,
/// total energy per unit volume, on a common grid.
struct EulerState1D {
  GridFunction rho;
  GridFunction momentum;
  GridFunction energy;

  const Grid& grid() const { return rho.grid; }
  /// p = (gamma - 1) (E - m^2 / (2 rho)).
  VectorX pressure() const;
};

/// First-order Rusanov (local Lax-Friedrichs) solver for 1D Euler.
/// Throws NumericError("positivity lost ...") with cell index and time if
/// density or pressure becomes non-positive.
EulerState1D euler_fvm(const EulerState1D& init, Real t_final, Real cfl = 0.45,
                       Boundary bc = Boundary::transmissive);

}  // namespace oplab
