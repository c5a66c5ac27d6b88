#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace relay_osc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using Complex = std::complex<double>;

}  // namespace relay_osc
