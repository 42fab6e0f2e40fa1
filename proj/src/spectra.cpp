#include "oplab/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace oplab {

Real SpectrumReport::tail_at(int p) const {
  for (const auto& [q, t] : tail_sums) {
    if (q == p) return t;
  }
  // Fall back to the eigenvalue list (valid while p is within it).
  Real partial = 0.0;
  for (Index j = 0; j < std::min<Index>(p, eigenvalues.size()); ++j) partial += eigenvalues[j];
  return trace - partial;
}

nlohmann::json SpectrumReport::to_json() const {
  nlohmann::json tails = nlohmann::json::array();
  for (const auto& [p, t] : tail_sums) tails.push_back({{"p", p}, {"tail", t}});
  std::vector<Real> eigs(eigenvalues.data(), eigenvalues.data() + eigenvalues.size());
  return {{"method", method},
          {"n_samples", n_samples},
          {"trace", trace},
          {"eigenvalues", eigs},
          {"tail_sums", tails}};
}

std::string SpectrumReport::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "rank,lambda,tail\n";
  Real partial = 0.0;
  for (Index j = 0; j < eigenvalues.size(); ++j) {
    partial += eigenvalues[j];
    os << (j + 1) << "," << eigenvalues[j] << "," << (trace - partial) << "\n";
  }
  return os.str();
}

std::vector<int> default_tail_ps(int max_p) {
  std::vector<int> ps = {0, 1, 2};
  for (int p = 4; p <= max_p; p *= 2) ps.push_back(p);
  return ps;
}

namespace {

void fill_tails(SpectrumReport& r, const std::vector<int>& tail_ps) {
  std::vector<int> ps = tail_ps.empty()
                            ? default_tail_ps(static_cast<int>(r.eigenvalues.size()))
                            : tail_ps;
  r.tail_sums.clear();
  for (int p : ps) {
    Real partial = 0.0;
    for (Index j = 0; j < std::min<Index>(p, r.eigenvalues.size()); ++j)
      partial += r.eigenvalues[j];
    r.tail_sums.emplace_back(p, r.trace - partial);
  }
}

/// Simpson rule on [a, b] with an odd number of nodes.
Real simpson(const std::function<Real(Real)>& f, Real a, Real b, int nodes = 2049) {
  if (b <= a) return 0.0;
  if (nodes % 2 == 0) ++nodes;
  const Real h = (b - a) / (nodes - 1);
  Real acc = f(a) + f(b);
  for (int i = 1; i < nodes - 1; ++i) acc += f(a + i * h) * ((i % 2) ? 4.0 : 2.0);
  return acc * h / 3.0;
}

}  // namespace

SpectrumReport box_measure_fourier_eigs(const BoxWaveMeasure& spec, Real period, int k_max,
                                        const std::vector<int>& tail_ps) {
  if (k_max < 1) throw ConfigError("box_measure_fourier_eigs: k_max must be >= 1");
  const Real dh = spec.h_max - spec.h_min;
  const Real h2 = dh > 0.0
                      ? (std::pow(spec.h_max, 3) - std::pow(spec.h_min, 3)) / (3.0 * dh)
                      : spec.h_min * spec.h_min;

  // |psi_hat_w(k)|^2 for the 1/period Fourier convention.
  const auto psi2 = [&](int k, Real w) {
    if (k == 0) return (w / period) * (w / period);
    const Real s = std::sin(pi * k * w / period) / (pi * k);
    return s * s;
  };
  const auto mean_over_w = [&](int k) {
    if (spec.w_max == spec.w_min) return psi2(k, spec.w_min);
    return simpson([&](Real w) { return psi2(k, w); }, spec.w_min, spec.w_max) /
           (spec.w_max - spec.w_min);
  };

  std::vector<Real> eigs;
  eigs.reserve(2 * k_max + 1);
  eigs.push_back(period * h2 * mean_over_w(0));
  for (int k = 1; k <= k_max; ++k) {
    const Real lam = period * h2 * mean_over_w(k);
    eigs.push_back(lam);  // cos/sin pair: +k and -k carry the same eigenvalue
    eigs.push_back(lam);
  }
  std::sort(eigs.begin(), eigs.end(), std::greater<Real>());

  SpectrumReport r;
  r.eigenvalues = Eigen::Map<VectorX>(eigs.data(), static_cast<Index>(eigs.size()));
  r.method = "fourier-diagonal";
  r.n_samples = 0;
  r.trace = r.eigenvalues.sum();
  fill_tails(r, tail_ps);
  return r;
}

namespace {

SpectrumReport from_eigensolve(const MatrixX& sym, Real trace, int n_samples, int p_max,
                               const std::vector<int>& tail_ps, const char* method) {
  Eigen::SelfAdjointEigenSolver<MatrixX> es(sym);
  if (es.info() != Eigen::Success) throw NumericError("covariance eigensolve failed");
  VectorX lam = es.eigenvalues().reverse();
  for (Index j = 0; j < lam.size(); ++j) lam[j] = std::max(lam[j], 0.0);
  SpectrumReport r;
  r.eigenvalues = lam.head(std::min<Index>(p_max, lam.size()));
  r.method = method;
  r.n_samples = n_samples;
  r.trace = trace;
  fill_tails(r, tail_ps);
  return r;
}

}  // namespace

SpectrumReport empirical_covariance_eigs(const std::vector<GridFunction>& data, int p_max,
                                         const std::vector<int>& tail_ps) {
  const int m = static_cast<int>(data.size());
  if (m < 2) throw ConfigError("empirical_covariance_eigs: need at least 2 samples");
  const Grid grid = data[0].grid;
  for (const auto& f : data) {
    if (!(f.grid == grid)) throw NumericError("empirical_covariance_eigs: grid mismatch");
  }
  const Index n = grid.n;
  MatrixX U(n, m);
  for (int s = 0; s < m; ++s) U.col(s) = data[s].values;
  const Real scale = grid.dx() / static_cast<Real>(m);
  const Real trace = scale * U.squaredNorm();

  if (m < n) {
    const MatrixX gram = scale * (U.transpose() * U);
    return from_eigensolve(gram, trace, m, p_max, tail_ps, "sample-covariance");
  }
  const MatrixX cov = scale * (U * U.transpose());
  return from_eigensolve(cov, trace, m, p_max, tail_ps, "sample-covariance");
}

SpectrumReport empirical_covariance_eigs_direct(const std::vector<GridFunction>& data, int p_max,
                                                const std::vector<int>& tail_ps) {
  const int m = static_cast<int>(data.size());
  if (m < 2) throw ConfigError("empirical_covariance_eigs_direct: need at least 2 samples");
  const Grid grid = data[0].grid;
  const Index n = grid.n;
  MatrixX U(n, m);
  for (int s = 0; s < m; ++s) U.col(s) = data[s].values;
  const Real scale = grid.dx() / static_cast<Real>(m);
  const MatrixX cov = scale * (U * U.transpose());
  return from_eigensolve(cov, cov.trace(), m, p_max, tail_ps, "sample-covariance");
}

Real fourier_projection_error(const std::vector<GridFunction>& data, int k_max) {
  std::vector<Real> errs;
  errs.reserve(data.size());
  for (const auto& f : data) {
    ComplexSpectrum s = dft(f);
    for (long k = s.k_min(); k <= s.k_max(); ++k) {
      if (std::abs(k) > k_max) s.coefficient(k) = Complex(0.0, 0.0);
    }
    const GridFunction trunc = idft(s, f.grid);
    errs.push_back(relative_l1(trunc, f));
  }
  if (errs.empty()) return 0.0;
  std::sort(errs.begin(), errs.end());
  const size_t mid = errs.size() / 2;
  return errs.size() % 2 ? errs[mid] : 0.5 * (errs[mid - 1] + errs[mid]);
}

LineFit fit_line(const std::vector<Real>& x, const std::vector<Real>& y) {
  const int n = static_cast<int>(x.size());
  LineFit fit;
  if (n < 2) return fit;
  Real sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const Real denom = n * sxx - sx * sx;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  Real ss = 0;
  for (int i = 0; i < n; ++i) {
    const Real r = y[i] - (fit.intercept + fit.slope * x[i]);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

Real fit_tail_exponent(const SpectrumReport& report, const std::vector<int>& ps) {
  std::vector<Real> lx, ly;
  for (int p : ps) {
    const Real t = report.tail_at(p);
    if (p > 0 && t > 0) {
      lx.push_back(std::log(static_cast<Real>(p)));
      ly.push_back(std::log(t));
    }
  }
  return fit_line(lx, ly).slope;
}

}  // namespace oplab
