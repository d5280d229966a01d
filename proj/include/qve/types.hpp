#pragma once

#include <Eigen/Dense>

namespace qve {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

} // namespace qve
