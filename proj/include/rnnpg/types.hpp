#pragma once

#include <Eigen/Dense>

namespace rnnpg {

/// Point in R^d, d <= 3, stored inline.
using Point = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 3, 1>;

/// Small d x d matrix, d <= 3 (displacement gradients, full tensors).
using SmallMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 3, 3>;

/// Columns are points.
using PointSet = Eigen::MatrixXd;

}  // namespace rnnpg
