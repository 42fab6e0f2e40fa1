#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oplab/exact_pde.hpp"
#include "oplab/grid.hpp"
#include "oplab/rng.hpp"

using namespace oplab;

namespace {

GridFunction random_function(const Grid& grid, std::uint64_t seed) {
  Rng rng(seed);
  VectorX v(grid.n);
  for (Index j = 0; j < grid.n; ++j) v[j] = rng.uniform(-1.0, 1.0);
  return GridFunction(grid, v);
}

}  // namespace

TEST_CASE("dft of a constant concentrates at k = 0") {
  const Grid grid{16};
  const auto s = dft(constant(grid, 2.5));
  CHECK(std::abs(s.coefficient(0) - Complex(2.5, 0.0)) < 1e-14);
  for (long k = s.k_min(); k <= s.k_max(); ++k) {
    if (k != 0) CHECK(std::abs(s.coefficient(k)) < 1e-14);
  }
}

TEST_CASE("dft of sin(x) on n = 8") {
  const Grid grid{8};
  VectorX v(grid.n);
  for (Index j = 0; j < grid.n; ++j) v[j] = std::sin(grid.point(j));
  const GridFunction f(grid, v);
  const auto s = dft(f);
  CHECK(std::abs(s.coefficient(1) - Complex(0.0, -0.5)) < 1e-14);
  CHECK(std::abs(s.coefficient(-1) - Complex(0.0, 0.5)) < 1e-14);
  for (long k = s.k_min(); k <= s.k_max(); ++k) {
    if (k != 1 && k != -1) CHECK(std::abs(s.coefficient(k)) < 1e-14);
  }
  // Direct-summation oracle agrees bitwise-tight with the FFT path.
  const auto sd = dft_direct(f);
  for (Index i = 0; i < s.size(); ++i) CHECK(std::abs(s.coeff[i] - sd.coeff[i]) < 1e-12);
}

TEST_CASE("dft of a centered box matches the continuum coefficient") {
  const Grid grid{1024};
  const auto f = sample_box_wave({1.0, 1.0, 0.0}, grid);
  const auto s = dft(f);
  const Real expected = std::sin(0.5) / pi;  // k = 1 coefficient, xi = 0
  CHECK(std::abs(s.coefficient(1) - Complex(expected, 0.0)) < 1e-2);
}

TEST_CASE("idft basics and round trip") {
  const Grid grid{64};
  SUBCASE("zero spectrum gives the zero function") {
    ComplexSpectrum s;
    s.coeff = VectorXc::Zero(grid.n);
    CHECK(norm(idft(s, grid), NormKind::Linf) == 0.0);
  }
  SUBCASE("constant mode only") {
    ComplexSpectrum s;
    s.coeff = VectorXc::Zero(grid.n);
    s.coefficient(0) = Complex(3.0, 0.0);
    const auto f = idft(s, grid);
    CHECK((f.values.array() - 3.0).abs().maxCoeff() < 1e-13);
  }
  SUBCASE("round trip on random data") {
    const auto f = random_function(grid, 11);
    const auto g = idft(dft(f), grid);
    CHECK((f.values - g.values).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("asymmetric spectrum is rejected") {
    ComplexSpectrum s;
    s.coeff = VectorXc::Zero(grid.n);
    s.coefficient(1) = Complex(1.0, 1.0);  // no conjugate partner
    CHECK_THROWS_WITH_AS(idft(s, grid), "non-real reconstruction", NumericError);
  }
}

TEST_CASE("fft and direct summation agree to 1e-12") {
  for (Index n : {8, 64, 256}) {
    const auto f = random_function(Grid{n}, 100 + n);
    const auto a = dft(f);
    const auto b = dft_direct(f);
    CHECK((a.coeff - b.coeff).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("non-power-of-two sizes use the direct path and invert") {
  const Grid grid{12};
  const auto f = random_function(grid, 3);
  const auto g = idft(dft(f), grid);
  CHECK((f.values - g.values).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("Parseval identity") {
  for (Index n : {8, 64, 256}) {
    const auto f = random_function(Grid{n}, 7 * n);
    const auto s = dft(f);
    const Real lhs = f.values.squaredNorm() / static_cast<Real>(n);
    const Real rhs = s.coeff.squaredNorm();
    CHECK(std::abs(lhs - rhs) < 1e-10);
  }
}

TEST_CASE("shift theorem on grid-aligned shifts") {
  const Grid grid{64};
  const auto f = random_function(grid, 17);
  const Index m = 9;
  VectorX shifted(grid.n);
  for (Index j = 0; j < grid.n; ++j) shifted[j] = f.values[(j - m + grid.n) % grid.n];
  const auto sf = dft(f);
  const auto ss = dft(GridFunction(grid, shifted));
  const Real xm = grid.point(m);
  for (long k = sf.k_min(); k <= sf.k_max(); ++k) {
    const Complex expected = std::polar(1.0, -k * xm) * sf.coefficient(k);
    CHECK(std::abs(ss.coefficient(k) - expected) < 1e-12);
  }
}

TEST_CASE("norms") {
  SUBCASE("zero function") {
    const auto z = zeros(Grid{32});
    CHECK(norm(z, NormKind::L1) == 0.0);
    CHECK(norm(z, NormKind::L2) == 0.0);
    CHECK(norm(z, NormKind::Linf) == 0.0);
  }
  SUBCASE("unit constant on the 2pi period") {
    CHECK(norm(constant(Grid{128}, 1.0), NormKind::L1) == doctest::Approx(two_pi).epsilon(1e-14));
  }
  SUBCASE("indicator L1 is its width up to 2 dx") {
    const Grid grid{2048};
    const auto f = sample_box_wave({1.0, 1.0, 0.0}, grid);
    CHECK(std::abs(norm(f, NormKind::L1) - 1.0) <= 2.0 * grid.dx());
  }
}

TEST_CASE("relative_l1") {
  const Grid grid{4096};
  const auto box = sample_box_wave({0.5, 0.3, 1.0}, grid);
  SUBCASE("identical inputs") { CHECK(relative_l1(box, box) == 0.0); }
  SUBCASE("doubling") {
    GridFunction twice(grid, 2.0 * box.values);
    CHECK(relative_l1(twice, box) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("constant offset against a small box") {
    GridFunction pred(grid, box.values.array() + 0.01);
    // 0.01 * 2pi / (0.5 * 0.3), up to the quadrature resolution of the box.
    CHECK(relative_l1(pred, box) == doctest::Approx(0.01 * two_pi / 0.15).epsilon(2e-2));
  }
  SUBCASE("zero reference") {
    CHECK_THROWS_WITH_AS(relative_l1(box, zeros(grid)), "degenerate reference", NumericError);
  }
}
