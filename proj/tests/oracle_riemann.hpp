#pragma once

// Exact Riemann solver for 1D Euler (gamma = 1.4), used as an independent
// oracle for the finite-volume solver. Pressure iteration by bisection on the
// monotone pressure function; sampling follows the classic wave-pattern case
// split.

#include <cmath>
#include <stdexcept>

namespace oracle {

struct PrimitiveState {
  double rho, u, p;
};

class ExactRiemann {
 public:
  ExactRiemann(PrimitiveState left, PrimitiveState right, double gamma = 1.4)
      : L_(left), R_(right), g_(gamma) {
    aL_ = std::sqrt(g_ * L_.p / L_.rho);
    aR_ = std::sqrt(g_ * R_.p / R_.rho);
    solve_star();
  }

  double p_star() const { return ps_; }
  double u_star() const { return us_; }

  /// Self-similar solution at speed s = x / t.
  PrimitiveState sample(double s) const {
    if (s < us_) return sample_left(s);
    return sample_right(s);
  }

 private:
  static constexpr double kTol = 1e-14;

  double f_side(double p, const PrimitiveState& K, double aK) const {
    if (p > K.p) {  // shock
      const double A = 2.0 / ((g_ + 1.0) * K.rho);
      const double B = (g_ - 1.0) / (g_ + 1.0) * K.p;
      return (p - K.p) * std::sqrt(A / (p + B));
    }
    return 2.0 * aK / (g_ - 1.0) * (std::pow(p / K.p, (g_ - 1.0) / (2.0 * g_)) - 1.0);
  }

  double f_total(double p) const {
    return f_side(p, L_, aL_) + f_side(p, R_, aR_) + (R_.u - L_.u);
  }

  void solve_star() {
    double lo = 1e-12;
    double hi = 10.0 * std::max(L_.p, R_.p);
    while (f_total(hi) < 0.0) hi *= 10.0;  // expand until bracketed
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (f_total(mid) < 0.0)
        lo = mid;
      else
        hi = mid;
      if (hi - lo < kTol * hi) break;
    }
    ps_ = 0.5 * (lo + hi);
    us_ = 0.5 * (L_.u + R_.u) + 0.5 * (f_side(ps_, R_, aR_) - f_side(ps_, L_, aL_));
  }

  PrimitiveState sample_left(double s) const {
    const double beta = (g_ - 1.0) / (g_ + 1.0);
    if (ps_ > L_.p) {  // left shock
      const double sl = L_.u - aL_ * std::sqrt((g_ + 1.0) / (2.0 * g_) * ps_ / L_.p +
                                               (g_ - 1.0) / (2.0 * g_));
      if (s < sl) return L_;
      const double rho = L_.rho * ((ps_ / L_.p + beta) / (beta * ps_ / L_.p + 1.0));
      return {rho, us_, ps_};
    }
    // left rarefaction
    const double a_star = aL_ * std::pow(ps_ / L_.p, (g_ - 1.0) / (2.0 * g_));
    const double head = L_.u - aL_;
    const double tail = us_ - a_star;
    if (s < head) return L_;
    if (s > tail) return {L_.rho * std::pow(ps_ / L_.p, 1.0 / g_), us_, ps_};
    const double a = 2.0 / (g_ + 1.0) * (aL_ + (g_ - 1.0) / 2.0 * (L_.u - s));
    const double u = 2.0 / (g_ + 1.0) * (aL_ + (g_ - 1.0) / 2.0 * L_.u + s);
    const double rho = L_.rho * std::pow(a / aL_, 2.0 / (g_ - 1.0));
    return {rho, u, rho * a * a / g_};
  }

  PrimitiveState sample_right(double s) const {
    const double beta = (g_ - 1.0) / (g_ + 1.0);
    if (ps_ > R_.p) {  // right shock
      const double sr = R_.u + aR_ * std::sqrt((g_ + 1.0) / (2.0 * g_) * ps_ / R_.p +
                                               (g_ - 1.0) / (2.0 * g_));
      if (s > sr) return R_;
      const double rho = R_.rho * ((ps_ / R_.p + beta) / (beta * ps_ / R_.p + 1.0));
      return {rho, us_, ps_};
    }
    // right rarefaction
    const double a_star = aR_ * std::pow(ps_ / R_.p, (g_ - 1.0) / (2.0 * g_));
    const double head = R_.u + aR_;
    const double tail = us_ + a_star;
    if (s > head) return R_;
    if (s < tail) return {R_.rho * std::pow(ps_ / R_.p, 1.0 / g_), us_, ps_};
    const double a = 2.0 / (g_ + 1.0) * (aR_ - (g_ - 1.0) / 2.0 * (R_.u - s));
    const double u = 2.0 / (g_ + 1.0) * (-aR_ + (g_ - 1.0) / 2.0 * R_.u + s);
    const double rho = R_.rho * std::pow(a / aR_, 2.0 / (g_ - 1.0));
    return {rho, u, rho * a * a / g_};
  }

  PrimitiveState L_, R_;
  double g_, aL_, aR_, ps_ = 0, us_ = 0;
};

}  // namespace oracle
