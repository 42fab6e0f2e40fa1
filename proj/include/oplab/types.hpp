#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace oplab {

using Real = double;
using Complex = std::complex<Real>;
using Index = Eigen::Index;

using VectorX = Eigen::VectorXd;
using MatrixX = Eigen::MatrixXd;
using VectorXc = Eigen::VectorXcd;
using MatrixXc = Eigen::MatrixXcd;
using ArrayX = Eigen::ArrayXd;

inline constexpr Real two_pi = 2.0 * std::numbers::pi_v<double>;
inline constexpr Real pi = std::numbers::pi_v<double>;

/// Invalid configuration or malformed inputs (CLI exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Numeric failure: divergence, positivity loss, degenerate data (exit code 3).
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Filesystem / serialization failure (exit code 4).
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace oplab
