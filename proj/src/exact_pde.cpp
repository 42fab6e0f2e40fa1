#include "oplab/exact_pde.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace oplab {

namespace {

/// Wrap y into [-period/2, period/2).
Real wrap_centered(Real y, Real period) {
  Real w = std::fmod(y, period);
  if (w < -period / 2) w += period;
  if (w >= period / 2) w -= period;
  return w;
}

}  // namespace

GridFunction sample_box_wave(const BoxWaveParams& params, const Grid& grid) {
  VectorX v(grid.n);
  for (Index j = 0; j < grid.n; ++j) {
    const Real d = wrap_centered(grid.point(j) - params.center, grid.period);
    v[j] = (std::abs(d) <= params.width / 2) ? params.height : 0.0;
  }
  return GridFunction(grid, v);
}

GridFunction advect_exact(const BoxWaveParams& params, Real speed, Real t, const Grid& grid) {
  BoxWaveParams shifted = params;
  shifted.center = params.center + speed * t;
  return sample_box_wave(shifted, grid);
}

Real burgers_xt(Real t) {
  if (t <= 1.0) return 0.0;
  // g(x) = t sin(x) - x is positive just right of 0 and negative at pi.
  Real lo = 1e-14, hi = pi;
  if (t * std::sin(lo) - lo <= 0.0) return 0.0;
  for (int it = 0; it < 200; ++it) {
    const Real mid = 0.5 * (lo + hi);
    if (t * std::sin(mid) - mid > 0.0)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-15) break;
  }
  return 0.5 * (lo + hi);
}

Real psi_inverse(Real x, Real t) {
  const Real xt = burgers_xt(t);
  Real lo = xt, hi = two_pi - xt;
  // Psi_t is increasing on [x_t, 2pi - x_t] with Psi(lo) = 0, Psi(hi) = 2pi.
  const auto psi = [t](Real x0) { return x0 - t * std::sin(x0); };
  if (x <= 0.0) return lo;
  if (x >= two_pi) return hi;
  for (int it = 0; it < 200; ++it) {
    const Real mid = 0.5 * (lo + hi);
    if (psi(mid) < x)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-15) break;
  }
  return 0.5 * (lo + hi);
}

GridFunction burgers_exact(Real xi, Real t, const Grid& grid) {
  VectorX v(grid.n);
  for (Index j = 0; j < grid.n; ++j) {
    Real y = grid.point(j) - xi;
    y = std::fmod(y, two_pi);
    if (y < 0.0) y += two_pi;  // right branch at y == 0
    v[j] = -std::sin(psi_inverse(y, t));
  }
  return GridFunction(grid, v);
}

namespace {

/// Godunov flux for f(u) = u^2 / 2.
Real godunov_flux(Real ul, Real ur) {
  const auto f = [](Real u) { return 0.5 * u * u; };
  if (ul <= ur) {
    if (ul >= 0.0) return f(ul);
    if (ur <= 0.0) return f(ur);
    return 0.0;  // transonic rarefaction
  }
  return std::max(f(ul), f(ur));
}

}  // namespace

GridFunction burgers_fvm(const GridFunction& u0, Real t_final, Real cfl) {
  if (cfl <= 0.0 || cfl > 1.0) throw NumericError("burgers_fvm: cfl out of (0,1]");
  const Index n = u0.size();
  const Real dx = u0.grid.dx();
  VectorX u = u0.values;
  Real t = 0.0;
  while (t < t_final) {
    const Real smax = u.cwiseAbs().maxCoeff();
    if (smax == 0.0) break;  // constant-zero state is stationary
    Real dt = cfl * dx / smax;
    dt = std::min(dt, t_final - t);
    VectorX flux(n);
    for (Index i = 0; i < n; ++i) {
      const Index ip = (i + 1) % n;
      flux[i] = godunov_flux(u[i], u[ip]);  // interface between cells i and i+1
    }
    VectorX un(n);
    for (Index i = 0; i < n; ++i) {
      const Index im = (i + n - 1) % n;
      un[i] = u[i] - dt / dx * (flux[i] - flux[im]);
    }
    u.swap(un);
    t += dt;
  }
  return GridFunction(u0.grid, u);
}

VectorX EulerState1D::pressure() const {
  return (euler_gamma_gas - 1.0) *
         (energy.values.array() -
          0.5 * momentum.values.array().square() / rho.values.array())
             .matrix();
}

EulerState1D euler_fvm(const EulerState1D& init, Real t_final, Real cfl, Boundary bc) {
  if (cfl <= 0.0 || cfl > 1.0) throw NumericError("euler_fvm: cfl out of (0,1]");
  const Grid grid = init.grid();
  const Index n = grid.n;
  const Real dx = grid.dx();
  const Real g = euler_gamma_gas;

  MatrixX U(3, n);  // rows: rho, m, E
  U.row(0) = init.rho.values.transpose();
  U.row(1) = init.momentum.values.transpose();
  U.row(2) = init.energy.values.transpose();

  const auto check_positivity = [&](const MatrixX& state, Real time) {
    for (Index i = 0; i < n; ++i) {
      const Real r = state(0, i);
      const Real p = (g - 1.0) * (state(2, i) - 0.5 * state(1, i) * state(1, i) / r);
      if (!(r > 0.0) || !(p > 0.0)) {
        std::ostringstream msg;
        msg << "positivity lost at cell " << i << ", t = " << time;
        throw NumericError(msg.str());
      }
    }
  };
  check_positivity(U, 0.0);

  const auto flux_of = [g](Real r, Real m, Real e) {
    const Real u = m / r;
    const Real p = (g - 1.0) * (e - 0.5 * m * u);
    return Eigen::Vector3d(m, m * u + p, (e + p) * u);
  };
  const auto wave_speed = [g](Real r, Real m, Real e) {
    const Real u = m / r;
    const Real p = (g - 1.0) * (e - 0.5 * m * u);
    return std::abs(u) + std::sqrt(g * p / r);
  };

  Real t = 0.0;
  while (t < t_final) {
    Real smax = 0.0;
    for (Index i = 0; i < n; ++i) smax = std::max(smax, wave_speed(U(0, i), U(1, i), U(2, i)));
    Real dt = cfl * dx / smax;
    dt = std::min(dt, t_final - t);

    // Interface i sits between cells i-1 and i; ghosts by wrapping or copying.
    MatrixX F(3, n + 1);
    const auto cell = [&](Index i) -> Index {
      if (bc == Boundary::periodic) return (i % n + n) % n;
      return std::clamp<Index>(i, 0, n - 1);
    };
    for (Index i = 0; i < n + 1; ++i) {
      const Eigen::Vector3d ul = U.col(cell(i - 1));
      const Eigen::Vector3d ur = U.col(cell(i));
      const Real s = std::max(wave_speed(ul[0], ul[1], ul[2]), wave_speed(ur[0], ur[1], ur[2]));
      F.col(i) = 0.5 * (flux_of(ul[0], ul[1], ul[2]) + flux_of(ur[0], ur[1], ur[2])) -
                 0.5 * s * (ur - ul);
    }
    for (Index i = 0; i < n; ++i) {
      U.col(i) -= dt / dx * (F.col(i + 1) - F.col(i));
    }
    t += dt;
    check_positivity(U, t);
  }

  EulerState1D out;
  out.rho = GridFunction(grid, U.row(0).transpose());
  out.momentum = GridFunction(grid, U.row(1).transpose());
  out.energy = GridFunction(grid, U.row(2).transpose());
  return out;
}

}  // namespace oplab
