#pragma once

#include <Eigen/Core>

namespace hlasso {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

} // namespace hlasso
