#include <gtest/gtest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include "gaugetrace/error.hpp"
#include "gaugetrace/lie.hpp"

using namespace gaugetrace;

namespace {

Mat random_skew(int m, unsigned seed, double scale) {
  std::srand(seed);
  Mat a = Mat::Random(m, m);
  return scale * (a - a.transpose()) / 2.0;
}

}  // namespace

TEST(Lie, ExpmMatchesEigenMatrixExponential) {
  for (int m : {2, 3, 4}) {
    for (double scale : {1e-9, 0.3, 2.0, 12.0}) {
      const Mat a = random_skew(m, 11 * m, scale);
      const Eigen::MatrixXd oracle = Eigen::MatrixXd(a).exp();
      const Mat e = lie::expm(lie::SkewMap(a)).matrix();
      EXPECT_LT((Eigen::MatrixXd(e) - oracle).norm(), 1e-12 * std::max(1.0, scale)) << m << ' ' << scale;
    }
  }
}

TEST(Lie, ExpOfComplexUnitIsRotation) {
  const double angle = 0.7;
  const Mat r = lie::expm(angle * lie::complex_unit()).matrix();
  EXPECT_NEAR(r(0, 0), std::cos(angle), 1e-15);
  EXPECT_NEAR(r(1, 0), std::sin(angle), 1e-15);
  EXPECT_NEAR(r(0, 1), -std::sin(angle), 1e-15);
}

TEST(Lie, So3GeneratorsCommute) {
  const auto l1 = lie::so3_generator(0), l2 = lie::so3_generator(1), l3 = lie::so3_generator(2);
  EXPECT_LT((lie::commutator(l1, l2).matrix() - l3.matrix()).norm(), 1e-15);
  EXPECT_LT((lie::commutator(l2, l3).matrix() - l1.matrix()).norm(), 1e-15);
  const Eigen::Vector3d w(0.3, -1.2, 0.5), v(1.0, 2.0, -0.4);
  EXPECT_LT((lie::hat(w).matrix() * v - w.cross(v)).norm(), 1e-15);
}

TEST(Lie, SkewMapRejectsNonSkew) {
  Mat a = Mat::Zero(2, 2);
  a(0, 1) = 1.0;
  EXPECT_THROW(lie::SkewMap{a}, Error);
  try {
    lie::SkewMap s(a);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotSkew);
  }
  EXPECT_LT((lie::SkewMap::project(a).matrix() + lie::SkewMap::project(a).matrix().transpose()).norm(), 1e-16);
}

TEST(Lie, OrthoOpRejectsNonOrthogonal) {
  Mat a = Mat::Identity(3, 3);
  a(0, 0) = 1.01;
  try {
    lie::OrthoOp op(a);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonOrthogonalGauge);
  }
}

TEST(Lie, PolarRetractionRecoversOrthogonalFactor) {
  const Mat q = lie::expm(lie::SkewMap(random_skew(3, 5, 1.0))).matrix();
  Mat sym = random_skew(3, 9, 1.0);
  sym = 0.01 * (sym * sym.transpose());
  const Mat perturbed = q * (Mat::Identity(3, 3) + sym);
  EXPECT_LT((lie::polar_retract(perturbed).matrix() - q).norm(), 1e-12);
  EXPECT_THROW(lie::polar_retract(Mat(2.0 * q)), Error);
  EXPECT_LT(lie::orthogonality_defect(q), 1e-14);
}

TEST(Lie, NormsMatchDefinitions) {
  Mat a(2, 2);
  a << 3, 0, 0, -4;
  EXPECT_DOUBLE_EQ(lie::op_norm(a), 4.0);
  EXPECT_DOUBLE_EQ(lie::hs_norm(a), 5.0);
}
