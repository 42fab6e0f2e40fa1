#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oplab/exact_pde.hpp"
#include "oplab/rng.hpp"
#include "oracle_riemann.hpp"

using namespace oplab;

TEST_CASE("advect_exact transports the box") {
  const Grid grid{256, 1.0};
  const BoxWaveParams p{0.6, 0.2, 0.3};
  SUBCASE("zero speed or time is the identity") {
    CHECK((advect_exact(p, 0.0, 3.0, grid).values - sample_box_wave(p, grid).values).norm() ==
          0.0);
    CHECK((advect_exact(p, 0.5, 0.0, grid).values - sample_box_wave(p, grid).values).norm() ==
          0.0);
  }
  SUBCASE("a = 0.5, T = 0.25 translates by 0.125 on the unit domain") {
    const auto out = advect_exact(p, 0.5, 0.25, grid);
    const auto expected = sample_box_wave({p.height, p.width, p.center + 0.125}, grid);
    CHECK((out.values - expected.values).norm() == 0.0);
  }
  SUBCASE("full-period transport wraps to the start") {
    const auto out = advect_exact(p, 1.0, grid.period, grid);
    CHECK((out.values - sample_box_wave(p, grid).values).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("two transports compose exactly") {
    const auto two = advect_exact(p, 0.5, 0.4, grid);
    BoxWaveParams mid = p;
    mid.center += 0.5 * 0.15;
    const auto composed = advect_exact(mid, 0.5, 0.25, grid);
    CHECK((two.values - composed.values).cwiseAbs().maxCoeff() < 1e-12);
  }
}

namespace {

/// Independent bisection oracle for the positive root of x = t sin(x).
Real xt_oracle(Real t) {
  if (t <= 1.0) return 0.0;
  Real lo = 1e-12, hi = pi - 1e-12;
  for (int i = 0; i < 300; ++i) {
    const Real mid = 0.5 * (lo + hi);
    ((t * std::sin(mid) - mid) > 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("burgers_xt") {
  CHECK(burgers_xt(0.5) == 0.0);
  CHECK(burgers_xt(1.0) == 0.0);
  const Real r = burgers_xt(1.4);
  CHECK(r > 0.0);
  CHECK(r < pi);
  CHECK(std::abs(r - xt_oracle(1.4)) < 1e-12);
  CHECK(std::abs(1.4 * std::sin(r) - r) < 1e-12);
}

TEST_CASE("psi_inverse") {
  SUBCASE("t = 0 is the identity") {
    for (Real x : {0.0, 1.0, 3.0, 6.0}) CHECK(psi_inverse(x, 0.0) == doctest::Approx(x).epsilon(1e-13));
  }
  SUBCASE("pi is a fixed point") {
    for (Real t : {0.3, 1.0, 1.4, 2.5}) CHECK(std::abs(psi_inverse(pi, t) - pi) < 1e-12);
  }
  SUBCASE("residual below 1e-12") {
    for (Real t : {0.5, 1.4, 2.0}) {
      for (Real x : {0.1, pi / 2, pi, 5.0, 6.2}) {
        const Real x0 = psi_inverse(x, t);
        CHECK(std::abs(x0 - t * std::sin(x0) - x) <= 1e-12);
        CHECK(x0 >= burgers_xt(t) - 1e-13);
        CHECK(x0 <= two_pi - burgers_xt(t) + 1e-13);
      }
    }
  }
}

TEST_CASE("burgers_exact") {
  const Grid grid{512};
  SUBCASE("initial data") {
    const Real xi = 1.3;
    const auto u = burgers_exact(xi, 0.0, grid);
    for (Index j = 0; j < grid.n; ++j) {
      CHECK(u.values[j] == doctest::Approx(-std::sin(grid.point(j) - xi)).epsilon(1e-12));
    }
  }
  SUBCASE("symmetry point stays at zero") {
    for (Real t : {0.5, 1.5, 3.0}) {
      const auto u = burgers_exact(0.0, t, Grid{256});
      CHECK(std::abs(u.values[128]) < 1e-12);  // x = pi
    }
  }
  SUBCASE("positive jump develops at the shift after breaking") {
    const Real t = 1.5;
    const auto u = burgers_exact(0.0, t, grid);
    const Real left_limit = u.values[grid.n - 1];
    const Real right_limit = u.values[0];
    CHECK(right_limit < 0.0);
    CHECK(left_limit > 0.0);
    CHECK(left_limit - right_limit == doctest::Approx(2 * std::sin(burgers_xt(t))).epsilon(1e-2));
  }
}

TEST_CASE("burgers_fvm") {
  SUBCASE("constant states are stationary") {
    const Grid grid{64};
    const auto out = burgers_fvm(constant(grid, 0.7), 1.0);
    CHECK((out.values.array() - 0.7).abs().maxCoeff() < 1e-14);
  }
  SUBCASE("Rankine-Hugoniot shock speed 1/2") {
    const Grid grid{1024};
    // u = 1 on [1, 3]: the downstream shock starts at x = 3 and moves at 1/2.
    const auto u0 = sample_box_wave({1.0, 2.0, 2.0}, grid);
    const Real t = 0.5;
    const auto u = burgers_fvm(u0, t);
    Index shock = 0;
    for (Index j = grid.n / 2; j < grid.n; ++j) {
      if (u.values[j] > 0.5 && u.values[(j + 1) % grid.n] <= 0.5) shock = j;
    }
    CHECK(std::abs(grid.point(shock) - (3.0 + 0.5 * t)) <= 2 * grid.dx() + 1e-12);
  }
  SUBCASE("discrete maximum principle") {
    const Grid grid{256};
    Rng rng(5);
    VectorX v(grid.n);
    for (Index j = 0; j < grid.n; ++j) v[j] = rng.uniform(-1.0, 2.0);
    const GridFunction u0(grid, v);
    const auto u = burgers_fvm(u0, 0.7);
    CHECK(u.values.minCoeff() >= u0.values.minCoeff() - 1e-12);
    CHECK(u.values.maxCoeff() <= u0.values.maxCoeff() + 1e-12);
  }
  SUBCASE("conserves the total integral") {
    const Grid grid{256};
    VectorX v(grid.n);
    for (Index j = 0; j < grid.n; ++j) v[j] = -std::sin(grid.point(j)) + 0.3;
    const GridFunction u0(grid, v);
    const auto u = burgers_fvm(u0, 1.0);
    CHECK(std::abs(u.values.sum() - u0.values.sum()) * grid.dx() < 1e-10);
  }
  SUBCASE("cross-oracle against characteristics at t = 1.5") {
    const Grid grid{1024};
    VectorX v(grid.n);
    for (Index j = 0; j < grid.n; ++j) v[j] = -std::sin(grid.point(j));
    const auto numeric = burgers_fvm(GridFunction(grid, v), 1.5);
    const auto exact = burgers_exact(0.0, 1.5, grid);
    GridFunction diff(grid, numeric.values - exact.values);
    CHECK(norm(diff, NormKind::L1) < 5e-3);
  }
  SUBCASE("L1 error decays with observed order >= 0.7") {
    Real prev = 0.0;
    std::vector<Real> errs;
    for (Index n : {256, 512, 1024}) {
      const Grid grid{n};
      VectorX v(n);
      for (Index j = 0; j < n; ++j) v[j] = -std::sin(grid.point(j));
      const auto numeric = burgers_fvm(GridFunction(grid, v), 1.5);
      const auto exact = burgers_exact(0.0, 1.5, grid);
      errs.push_back(norm(GridFunction(grid, numeric.values - exact.values), NormKind::L1));
      (void)prev;
    }
    CHECK(errs[0] / errs[1] > std::pow(2.0, 0.7));
    CHECK(errs[1] / errs[2] > std::pow(2.0, 0.7));
  }
}

namespace {

EulerState1D primitive_state(const Grid& grid, Real rho, Real u, Real p) {
  EulerState1D s;
  s.rho = constant(grid, rho);
  s.momentum = constant(grid, rho * u);
  s.energy = constant(grid, 0.5 * rho * u * u + p / (euler_gamma_gas - 1.0));
  return s;
}

}  // namespace

TEST_CASE("euler_fvm") {
  SUBCASE("uniform state is stationary") {
    const Grid grid{64, 10.0};
    const auto out = euler_fvm(primitive_state(grid, 1.0, 0.5, 2.0), 1.0);
    CHECK((out.rho.values.array() - 1.0).abs().maxCoeff() < 1e-13);
    CHECK((out.momentum.values.array() - 0.5).abs().maxCoeff() < 1e-13);
  }
  SUBCASE("conservation under periodic boundaries") {
    const Grid grid{128};
    EulerState1D init;
    VectorX rho(grid.n), mom(grid.n), en(grid.n);
    for (Index j = 0; j < grid.n; ++j) {
      const Real x = grid.point(j);
      rho[j] = 1.0 + 0.3 * std::sin(x);
      mom[j] = 0.2 * std::cos(x) * rho[j];
      en[j] = 0.5 * mom[j] * mom[j] / rho[j] + 1.0 / (euler_gamma_gas - 1.0);
    }
    init.rho = GridFunction(grid, rho);
    init.momentum = GridFunction(grid, mom);
    init.energy = GridFunction(grid, en);
    const auto out = euler_fvm(init, 0.5, 0.45, Boundary::periodic);
    CHECK(std::abs(out.rho.values.sum() - rho.sum()) < 1e-10 * grid.n);
    CHECK(std::abs(out.momentum.values.sum() - mom.sum()) < 1e-10 * grid.n);
    CHECK(std::abs(out.energy.values.sum() - en.sum()) < 1e-10 * grid.n);
  }
  SUBCASE("negative pressure is rejected with location info") {
    const Grid grid{16, 1.0};
    EulerState1D bad = primitive_state(grid, 1.0, 1.0, 1.0);
    bad.energy.values.setConstant(0.3);  // below the kinetic part
    CHECK_THROWS_AS(euler_fvm(bad, 0.1), NumericError);
  }
  SUBCASE("Sod shock tube against the exact Riemann oracle") {
    const Grid grid{2048, 1.0};
    const oracle::ExactRiemann exact({1.0, 0.0, 1.0}, {0.125, 0.0, 0.1});
    // Known star values for Sod's problem.
    CHECK(exact.p_star() == doctest::Approx(0.30313).epsilon(1e-4));
    CHECK(exact.u_star() == doctest::Approx(0.92745).epsilon(1e-4));

    EulerState1D init;
    VectorX rho(grid.n), mom(grid.n), en(grid.n);
    for (Index j = 0; j < grid.n; ++j) {
      const bool left = grid.point(j) <= 0.5;
      const Real r = left ? 1.0 : 0.125;
      const Real p = left ? 1.0 : 0.1;
      rho[j] = r;
      mom[j] = 0.0;
      en[j] = p / (euler_gamma_gas - 1.0);
    }
    init.rho = GridFunction(grid, rho);
    init.momentum = GridFunction(grid, mom);
    init.energy = GridFunction(grid, en);
    const Real t = 0.2;
    const auto out = euler_fvm(init, t);
    Real err = 0.0;
    for (Index j = 0; j < grid.n; ++j) {
      const Real s = (grid.point(j) - 0.5) / t;
      err += std::abs(out.rho.values[j] - exact.sample(s).rho) * grid.dx();
    }
    CHECK(err < 2e-2);
  }
}
