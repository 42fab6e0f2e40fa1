#pragma once

#include <vector>

#include "oplab/types.hpp"

namespace oplab {

/// Equidistant periodic grid: x_j = period * j / n, j = 0..n-1.
struct Grid {
  Index n = 0;
  Real period = two_pi;

  Real dx() const { return period / static_cast<Real>(n); }
  Real point(Index j) const { return period * static_cast<Real>(j) / static_cast<Real>(n); }
  VectorX points() const;

  friend bool operator==(const Grid&, const Grid&) = default;
};

/// Real-valued function sampled on a periodic grid.
struct GridFunction {
  Grid grid;
  VectorX values;

  GridFunction() = default;
  GridFunction(Grid g, VectorX v);

  Index size() const { return values.size(); }
};

GridFunction zeros(const Grid& grid);
GridFunction constant(const Grid& grid, Real c);

/// DFT coefficients under the 1/N-normalized forward convention
///   F f(k) = (1/N) sum_j f(x_j) e^{-2 pi i k j / N},
/// stored in bin order (bin j holds wavenumber k with j = k mod n), so valid
/// wavenumbers are k in {-floor(n/2), ..., ceil(n/2)-1}.
struct ComplexSpectrum {
  VectorXc coeff;

  Index size() const { return coeff.size(); }
  long k_min() const { return -static_cast<long>(size() / 2); }
  long k_max() const { return static_cast<long>((size() + 1) / 2) - 1; }

  Complex coefficient(long k) const { return coeff[bin(k)]; }
  Complex& coefficient(long k) { return coeff[bin(k)]; }

  Index bin(long k) const;
};

/// Forward DFT. Radix-2 FFT when n is a power of two, direct summation
/// otherwise; the two paths agree to 1e-12.
ComplexSpectrum dft(const GridFunction& f);

/// Direct O(n^2) forward DFT; reference path for the FFT and for odd n.
ComplexSpectrum dft_direct(const GridFunction& f);

/// Inverse DFT onto a real grid function. Requires a conjugate-symmetric
/// spectrum; throws NumericError("non-real reconstruction") otherwise.
GridFunction idft(const ComplexSpectrum& s, const Grid& grid);

/// Inverse DFT without the realness check (complex output).
VectorXc idft_complex(const ComplexSpectrum& s);

enum class NormKind { L1, L2, Linf };

/// Left-endpoint rectangle-rule norms: L1 = dx * sum |f|, L2 = sqrt(dx * sum f^2).
Real norm(const GridFunction& f, NormKind kind);

/// norm(pred - truth, L1) / norm(truth, L1).
/// Throws NumericError("degenerate reference") when the truth has zero norm.
Real relative_l1(const GridFunction& pred, const GridFunction& truth);

namespace detail {
/// Unnormalized in-place radix-2 FFT (n must be a power of two).
void fft_radix2(VectorXc& a);
bool is_power_of_two(Index n);
}  // namespace detail

}  // namespace oplab
