#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "oplab/grid.hpp"
#include "oplab/measures.hpp"

namespace oplab {

/// Ordered spectrum of a (second-moment) covariance operator with tail sums
/// sum_{j>p} lambda_j. The optimal p-dimensional linear reconstruction error
/// is sqrt(tail(p)).
struct SpectrumReport {
  VectorX eigenvalues;  // descending, negatives clamped to zero
  std::vector<std::pair<int, Real>> tail_sums;
  std::string method;  // "fourier-diagonal" or "sample-covariance"
  int n_samples = 0;
  Real trace = 0.0;

  Real tail_at(int p) const;
  nlohmann::json to_json() const;
  std::string to_csv() const;  // columns: rank, lambda, tail_beyond_rank
};

std::vector<int> default_tail_ps(int max_p);

/// Semi-analytic covariance eigenvalues of the box-wave measure in the Fourier
/// basis: lambda_k = period * E[h^2] * E_w[|psi_hat_w(k)|^2], each |k| >= 1
/// counted twice (cos/sin pair). E_w is evaluated by Simpson quadrature of the
/// closed-form squared coefficient.
SpectrumReport box_measure_fourier_eigs(const BoxWaveMeasure& spec, Real period, int k_max,
                                        const std::vector<int>& tail_ps = {});

/// Uncentered sample covariance spectrum in the dx-weighted L2 inner product.
/// Uses the m x m Gram matrix when there are fewer samples than grid points.
SpectrumReport empirical_covariance_eigs(const std::vector<GridFunction>& data, int p_max,
                                         const std::vector<int>& tail_ps = {});

/// Small-case reference: assemble the full n x n operator and decompose it
/// directly (no Gram shortcut); used to validate the Gram route.
SpectrumReport empirical_covariance_eigs_direct(const std::vector<GridFunction>& data, int p_max,
                                                const std::vector<int>& tail_ps = {});

/// Median relative L1 error of truncating each sample to modes |k| <= k_max.
Real fourier_projection_error(const std::vector<GridFunction>& data, int k_max);

/// Least-squares slope of log tail(p) against log p over the given p values.
Real fit_tail_exponent(const SpectrumReport& report, const std::vector<int>& ps);

/// Least-squares fit y = a + b x; returns {b, a, rms residual}.
struct LineFit {
  Real slope = 0.0;
  Real intercept = 0.0;
  Real residual = 0.0;
};
LineFit fit_line(const std::vector<Real>& x, const std::vector<Real>& y);

}  // namespace oplab
