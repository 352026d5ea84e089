#include "gaugetrace/lie.hpp"

#include <cmath>

#include "gaugetrace/error.hpp"

namespace gaugetrace::lie {

namespace {

void require_square(const Mat& a, const char* what) {
  if (a.rows() != a.cols()) {
    fail(ErrorKind::DimensionMismatch, std::string(what) + ": matrix is not square");
  }
}

// Degree-6 diagonal Pade approximant with scaling and squaring. For skew
// input r(X) = N(X) / N(-X) is orthogonal up to rounding.
Mat pade6_expm(const Mat& a) {
  const int m = static_cast<int>(a.rows());
  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm1 > 0.5) squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm1 / 0.5))));
  const Mat x = a / std::ldexp(1.0, squarings);

  constexpr int q = 6;
  double c = 1.0;
  const Mat eye = Mat::Identity(m, m);
  Mat power = eye;
  Mat numer = eye;
  Mat denom = eye;
  for (int k = 1; k <= q; ++k) {
    c *= static_cast<double>(q - k + 1) / static_cast<double>(k * (2 * q - k + 1));
    power = power * x;
    numer += c * power;
    denom += ((k % 2 == 0) ? c : -c) * power;
  }
  Mat result = denom.partialPivLu().solve(numer);
  for (int i = 0; i < squarings; ++i) result = result * result;
  return result;
}

}  // namespace

SkewMap::SkewMap(const Mat& entries, double tolerance) : entries_(entries) {
  require_square(entries, "SkewMap");
  const double scale = std::max(1.0, entries.cwiseAbs().maxCoeff());
  const double asym = (entries + entries.transpose()).cwiseAbs().maxCoeff();
  if (asym > tolerance * scale) {
    fail(ErrorKind::NotSkew, "matrix is not skew-symmetric (|a + a^T| = " + std::to_string(asym) + ")");
  }
}

SkewMap SkewMap::project(const Mat& a) {
  require_square(a, "SkewMap::project");
  SkewMap out;
  out.entries_ = 0.5 * (a - a.transpose());
  return out;
}

SkewMap SkewMap::operator+(const SkewMap& other) const {
  if (dim() != other.dim()) fail(ErrorKind::DimensionMismatch, "SkewMap sum");
  SkewMap out;
  out.entries_ = entries_ + other.entries_;
  return out;
}

SkewMap SkewMap::operator-(const SkewMap& other) const {
  if (dim() != other.dim()) fail(ErrorKind::DimensionMismatch, "SkewMap difference");
  SkewMap out;
  out.entries_ = entries_ - other.entries_;
  return out;
}

SkewMap SkewMap::operator*(double scale) const {
  SkewMap out;
  out.entries_ = entries_ * scale;
  return out;
}

SkewMap& SkewMap::operator+=(const SkewMap& other) {
  if (dim() != other.dim()) fail(ErrorKind::DimensionMismatch, "SkewMap sum");
  entries_ += other.entries_;
  return *this;
}

double orthogonality_defect(const Mat& a) {
  const int m = static_cast<int>(a.cols());
  return op_norm(a.transpose() * a - Mat::Identity(m, m));
}

OrthoOp::OrthoOp(const Mat& entries, double tolerance) : entries_(entries), tolerance_(tolerance) {
  require_square(entries, "OrthoOp");
  const double defect = orthogonality_defect(entries);
  if (!(defect <= tolerance)) {
    fail(ErrorKind::NonOrthogonalGauge,
         "matrix is not orthogonal (|a^T a - I| = " + std::to_string(defect) + ")");
  }
}

OrthoOp OrthoOp::identity(int m) {
  OrthoOp out;
  out.entries_ = Mat::Identity(m, m);
  return out;
}

OrthoOp OrthoOp::inverse() const {
  OrthoOp out;
  out.entries_ = entries_.transpose();
  out.tolerance_ = tolerance_;
  return out;
}

OrthoOp OrthoOp::operator*(const OrthoOp& other) const {
  if (dim() != other.dim()) fail(ErrorKind::DimensionMismatch, "OrthoOp product");
  OrthoOp out;
  out.entries_ = entries_ * other.entries_;
  out.tolerance_ = std::max(tolerance_, other.tolerance_);
  return out;
}

OrthoOp expm(const SkewMap& a) {
  const int m = a.dim();
  const Mat& x = a.matrix();
  Mat result;
  if (m == 0) return OrthoOp::identity(0);
  if (m == 1) {
    result = Mat::Identity(1, 1);
  } else if (m == 2) {
    const double theta = x(1, 0);
    result.resize(2, 2);
    result << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  } else if (m == 3) {
    // Rodrigues: exp([w]) = I + sin(t)/t [w] + (1 - cos t)/t^2 [w]^2.
    const Eigen::Vector3d w(x(2, 1), x(0, 2), x(1, 0));
    const double theta = w.norm();
    const Mat eye = Mat::Identity(3, 3);
    if (theta < 1e-8) {
      result = eye + x + 0.5 * x * x;
    } else {
      result = eye + (std::sin(theta) / theta) * x + ((1.0 - std::cos(theta)) / (theta * theta)) * (x * x);
    }
  } else {
    result = pade6_expm(x);
  }
  OrthoOp out(result, 1e-10);
  return out;
}

OrthoOp polar_retract(const Mat& a) {
  require_square(a, "polar_retract");
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sigma = svd.singularValues();
  if (sigma.size() > 0 && (sigma.minCoeff() <= 0.5 || sigma.maxCoeff() >= 1.5)) {
    fail(ErrorKind::SingularInput, "singular values outside (0.5, 1.5); integration diverged");
  }
  const Mat q = svd.matrixU() * svd.matrixV().transpose();
  return OrthoOp(q, 1e-10);
}

SkewMap commutator(const SkewMap& a, const SkewMap& b) {
  if (a.dim() != b.dim()) fail(ErrorKind::DimensionMismatch, "commutator of different dimensions");
  return SkewMap::project(a.matrix() * b.matrix() - b.matrix() * a.matrix());
}

double op_norm(const Mat& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Mat> svd(a);
  return svd.singularValues()(0);
}

double hs_norm(const Mat& a) { return a.norm(); }

SkewMap so3_generator(int axis) {
  Eigen::Vector3d w = Eigen::Vector3d::Zero();
  w(axis) = 1.0;
  return hat(w);
}

SkewMap hat(const Eigen::Vector3d& w) {
  Mat x(3, 3);
  x << 0.0, -w(2), w(1),
       w(2), 0.0, -w(0),
       -w(1), w(0), 0.0;
  return SkewMap::project(x);
}

SkewMap complex_unit() {
  Mat j(2, 2);
  j << 0.0, -1.0, 1.0, 0.0;
  return SkewMap::project(j);
}

}  // namespace gaugetrace::lie
