#pragma once

#include <complex>
#include <numbers>

#include <Eigen/Dense>

namespace ftnslp {

using cplx = std::complex<double>;
using Eigen::Index;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;
using Eigen::VectorXi;

inline constexpr double kPi = std::numbers::pi;
inline constexpr cplx kJ{0.0, 1.0};

}  // namespace ftnslp
