#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace mubtomo {

using Cx = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;
using RealVec = Eigen::VectorXd;
using RealMat = Eigen::MatrixXd;

inline constexpr double kPi = std::numbers::pi;

/// File could not be opened, parsed, or written.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A certification contract failed (unbiasedness, completeness, physicality).
struct CertificationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace mubtomo
