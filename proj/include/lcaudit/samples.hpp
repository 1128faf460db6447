#pragma once

#include <Eigen/Dense>

namespace lcaudit {

// A set of equal-length vectors, one sample per row.
using SampleMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Exact difference-based distance; no ||a||^2 + ||b||^2 - 2ab shortcut, so
// identical rows are at distance exactly 0.
template <typename A, typename B>
double squared_distance(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
    return (a - b).squaredNorm();
}

}  // namespace lcaudit
