#pragma once

#include <Eigen/Dense>

namespace gaugetrace {

// Fiber and base dimensions are tiny (m, d <= 4); fixed-capacity Eigen
// storage keeps every hot loop allocation-free.
inline constexpr int kMaxDim = 4;

using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim, kMaxDim>;
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;

/// Point of the base domain R^d.
using Point = Vec;
/// Value in the fiber F = R^m.
using FiberVec = Vec;

inline Vec unit_vector(int dim, int axis) {
  Vec e = Vec::Zero(dim);
  e(axis) = 1.0;
  return e;
}

}  // namespace gaugetrace
