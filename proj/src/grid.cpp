#include "oplab/grid.hpp"

#include <cmath>

namespace oplab {

VectorX Grid::points() const {
  VectorX x(n);
  for (Index j = 0; j < n; ++j) x[j] = point(j);
  return x;
}

GridFunction::GridFunction(Grid g, VectorX v) : grid(g), values(std::move(v)) {
  if (values.size() != grid.n) {
    throw NumericError("GridFunction: values length does not match grid");
  }
}

GridFunction zeros(const Grid& grid) { return GridFunction(grid, VectorX::Zero(grid.n)); }

GridFunction constant(const Grid& grid, Real c) {
  return GridFunction(grid, VectorX::Constant(grid.n, c));
}

Index ComplexSpectrum::bin(long k) const {
  const long n = static_cast<long>(size());
  long j = k % n;
  if (j < 0) j += n;
  return static_cast<Index>(j);
}

namespace detail {

bool is_power_of_two(Index n) { return n > 0 && (n & (n - 1)) == 0; }

void fft_radix2(VectorXc& a) {
  const Index n = a.size();
  // Bit-reversal permutation.
  for (Index i = 1, j = 0; i < n; ++i) {
    Index bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (Index len = 2; len <= n; len <<= 1) {
    const Real ang = -two_pi / static_cast<Real>(len);
    for (Index i = 0; i < n; i += len) {
      for (Index k = 0; k < len / 2; ++k) {
        // Twiddles from std::polar each pass; n is small enough here that
        // bitwise reproducibility matters more than the table lookup.
        const Complex w = std::polar(1.0, ang * static_cast<Real>(k));
        const Complex u = a[i + k];
        const Complex v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
      }
    }
  }
}

}  // namespace detail

ComplexSpectrum dft_direct(const GridFunction& f) {
  const Index n = f.size();
  ComplexSpectrum s;
  s.coeff = VectorXc::Zero(n);
  for (Index k = 0; k < n; ++k) {
    Complex acc(0.0, 0.0);
    for (Index j = 0; j < n; ++j) {
      const Real ang = -two_pi * static_cast<Real>((k * j) % n) / static_cast<Real>(n);
      acc += f.values[j] * Complex(std::cos(ang), std::sin(ang));
    }
    s.coeff[k] = acc / static_cast<Real>(n);
  }
  return s;
}

ComplexSpectrum dft(const GridFunction& f) {
  const Index n = f.size();
  if (!detail::is_power_of_two(n)) return dft_direct(f);
  ComplexSpectrum s;
  s.coeff = f.values.cast<Complex>();
  detail::fft_radix2(s.coeff);
  s.coeff /= static_cast<Real>(n);
  return s;
}

VectorXc idft_complex(const ComplexSpectrum& s) {
  const Index n = s.size();
  if (detail::is_power_of_two(n)) {
    // f = conj(FFT(conj(c))): inverse via the forward kernel.
    VectorXc a = s.coeff.conjugate();
    detail::fft_radix2(a);
    return a.conjugate();
  }
  VectorXc out = VectorXc::Zero(n);
  for (Index j = 0; j < n; ++j) {
    Complex acc(0.0, 0.0);
    for (Index k = 0; k < n; ++k) {
      const Real ang = two_pi * static_cast<Real>((k * j) % n) / static_cast<Real>(n);
      acc += s.coeff[k] * Complex(std::cos(ang), std::sin(ang));
    }
    out[j] = acc;
  }
  return out;
}

GridFunction idft(const ComplexSpectrum& s, const Grid& grid) {
  if (s.size() != grid.n) throw NumericError("idft: spectrum size does not match grid");
  const VectorXc out = idft_complex(s);
  const Real scale = std::max(Real(1), out.cwiseAbs().maxCoeff());
  if (out.imag().cwiseAbs().maxCoeff() > 1e-9 * scale) {
    throw NumericError("non-real reconstruction");
  }
  return GridFunction(grid, out.real());
}

Real norm(const GridFunction& f, NormKind kind) {
  switch (kind) {
    case NormKind::L1:
      return f.grid.dx() * f.values.cwiseAbs().sum();
    case NormKind::L2:
      return std::sqrt(f.grid.dx() * f.values.squaredNorm());
    case NormKind::Linf:
      return f.size() == 0 ? 0.0 : f.values.cwiseAbs().maxCoeff();
  }
  return 0.0;
}

Real relative_l1(const GridFunction& pred, const GridFunction& truth) {
  if (!(pred.grid == truth.grid)) throw NumericError("relative_l1: grid mismatch");
  const Real denom = norm(truth, NormKind::L1);
  if (denom == 0.0) throw NumericError("degenerate reference");
  GridFunction diff(pred.grid, pred.values - truth.values);
  return norm(diff, NormKind::L1) / denom;
}

}  // namespace oplab
