#pragma once

#include "gaugetrace/types.hpp"

namespace gaugetrace::lie {

/// Element of the Lie algebra o(F): a skew-symmetric m x m matrix.
class SkewMap {
 public:
  static constexpr double kTolerance = 1e-12;

  SkewMap() = default;
  explicit SkewMap(int m) : entries_(Mat::Zero(m, m)) {}
  /// Throws NotSkew when |a + a^T| exceeds `tolerance` (scaled by max(1, |a|)).
  explicit SkewMap(const Mat& entries, double tolerance = kTolerance);

  /// Skew part (a - a^T) / 2, never throws.
  static SkewMap project(const Mat& a);

  int dim() const { return static_cast<int>(entries_.rows()); }
  const Mat& matrix() const { return entries_; }

  SkewMap operator+(const SkewMap& other) const;
  SkewMap operator-(const SkewMap& other) const;
  SkewMap operator*(double scale) const;
  SkewMap& operator+=(const SkewMap& other);

 private:
  Mat entries_;
};

inline SkewMap operator*(double scale, const SkewMap& a) { return a * scale; }

/// Element of the structure group O(F).
class OrthoOp {
 public:
  static constexpr double kDefaultTolerance = 1e-10;

  OrthoOp() = default;
  /// Throws NonOrthogonalGauge when |a^T a - I| exceeds `tolerance`.
  explicit OrthoOp(const Mat& entries, double tolerance = kDefaultTolerance);

  static OrthoOp identity(int m);

  int dim() const { return static_cast<int>(entries_.rows()); }
  const Mat& matrix() const { return entries_; }
  double tolerance() const { return tolerance_; }

  OrthoOp inverse() const;
  OrthoOp operator*(const OrthoOp& other) const;
  FiberVec apply(const FiberVec& v) const { return entries_ * v; }

 private:
  Mat entries_;
  double tolerance_ = kDefaultTolerance;
};

/// Operator norm |a^T a - I|, the orthogonality defect.
double orthogonality_defect(const Mat& a);

OrthoOp expm(const SkewMap& a);

/// Orthogonal polar factor of a near-orthogonal matrix.
/// Throws SingularInput when a singular value leaves (0.5, 1.5).
OrthoOp polar_retract(const Mat& a);

SkewMap commutator(const SkewMap& a, const SkewMap& b);

double op_norm(const Mat& a);
double hs_norm(const Mat& a);

/// Standard so(3) generator L_axis (axis in {0,1,2}), with [L1, L2] = L3.
SkewMap so3_generator(int axis);
/// Hat map R^3 -> so(3): w -> [w]_x.
SkewMap hat(const Eigen::Vector3d& w);
/// J = [[0,-1],[1,0]], multiplication by i on C = R^2.
SkewMap complex_unit();

}  // namespace gaugetrace::lie
