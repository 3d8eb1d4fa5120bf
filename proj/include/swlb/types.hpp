#pragma once

#include <Eigen/Dense>

namespace swlb {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

}  // namespace swlb
