#include <gtest/gtest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include "gaugetrace/connection.hpp"
#include "gaugetrace/error.hpp"
#include "gaugetrace/registry.hpp"
#include "gaugetrace/transport.hpp"

using namespace gaugetrace;
using nlohmann::json;

namespace {

Point pt(double a, double b) {
  Point x(2);
  x << a, b;
  return x;
}

ConnectionForm flux(double b) { return make_connection({{"family", "flux-abelian"}, {"B", b}}, 2, 2); }

}  // namespace

TEST(Connection, FluxCurvatureIsConstant) {
  const ConnectionForm g = flux(1.7);
  const Mat k = curvature(g, pt(0.3, -0.4), unit_vector(2, 0), unit_vector(2, 1)).matrix();
  EXPECT_LT((k - 1.7 * lie::complex_unit().matrix()).norm(), 1e-12);
}

TEST(Connection, ConstantCurvatureIsTheBracket) {
  const auto g1 = lie::hat(Eigen::Vector3d(0.2, -0.5, 0.1));
  const auto g2 = lie::hat(Eigen::Vector3d(0.7, 0.3, 0.0));
  const ConnectionForm g = ConnectionForm::constant({g1, g2});
  const Mat k = curvature(g, pt(0.0, 1.0), unit_vector(2, 0), unit_vector(2, 1)).matrix();
  EXPECT_LT((k - (g1.matrix() * g2.matrix() - g2.matrix() * g1.matrix())).norm(), 1e-15);
}

TEST(Connection, PureGaugeIsFlat) {
  const GaugeField phi = make_gauge(
      {{"family", "theta"}, {"gradient", {0.5, -0.3}}, {"amplitude", 0.6}, {"frequency", {1.3, 0.4}}}, 2, 2);
  const ConnectionForm g = gauge_transform(ConnectionForm::zero(2, 2), phi);
  EXPECT_LT(lie::op_norm(curvature(g, pt(0.4, 0.2), unit_vector(2, 0), unit_vector(2, 1)).matrix()), 1e-7);
  // Transport of a pure gauge is phi(x) phi(y)^{-1}.
  const Point x = pt(-0.5, 0.1), y = pt(0.8, 0.9);
  const Mat expect = phi.value(x).matrix() * phi.value(y).matrix().transpose();
  EXPECT_LT((transport_segment(g, x, y, 256).matrix() - expect).norm(), 1e-9);
}

TEST(Connection, SampledConnectionReproducesNodeValues) {
  const ConnectionForm g = flux(1.0);
  const RectilinearGrid grid({{-1.0, 0.0, 1.0}, {0.0, 0.5, 1.0}});
  std::vector<double> values(grid.node_count() * 2 * 4);
  for (std::size_t node = 0; node < grid.node_count(); ++node) {
    for (int i = 0; i < 2; ++i) {
      const Mat a = g.eval_matrix(grid.node(node), unit_vector(2, i));
      for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) values[node * 8 + i * 4 + r * 2 + c] = a(r, c);
    }
  }
  const ConnectionForm sampled = ConnectionForm::sampled(grid, 2, values);
  // Flux potential is linear, so multilinear interpolation is exact.
  const Point x = pt(0.37, 0.81);
  EXPECT_LT((sampled.eval_matrix(x, unit_vector(2, 1)) - g.eval_matrix(x, unit_vector(2, 1))).norm(), 1e-14);
  EXPECT_THROW(sampled.eval_matrix(pt(3.0, 0.0), unit_vector(2, 0)), Error);
}

TEST(Connection, IllConditionedChartIsRejected) {
  Mat a = Mat::Identity(2, 2);
  a(1, 1) = 1e-7;
  const Chart psi = Chart::linear(a);
  EXPECT_THROW(psi.jacobian(pt(0.0, 0.0)), Error);
}

TEST(Connection, CurvatureSupMatchesOracle) {
  Point lo = pt(-1.0, 0.0), hi = pt(1.0, 1.0);
  EXPECT_NEAR(curvature_sup_norm(flux(2.5), Box{lo, hi}, 32), 2.5, 1e-10);
  EXPECT_EQ(curvature_sup_norm(ConnectionForm::zero(2, 3), Box{lo, hi}, 32), 0.0);
}

TEST(Transport, ReverseSegmentIsTheTranspose) {
  const json spec = {{"family", "affine-so3"},
                     {"base", {{0.3, 0.0, 0.1}, {0.0, 0.2, 0.0}}},
                     {"slope", {{{0.0, 0.0, 0.2}, {0.1, 0.0, 0.0}}, {{0.0, 0.1, 0.0}, {0.0, 0.0, 0.15}}}}};
  const ConnectionForm g = make_connection(spec, 2, 3);
  const Point x = pt(-0.3, 0.2), y = pt(0.6, 0.9);
  const Mat r = transport_segment(g, x, y, 256).matrix();
  const Mat back = transport_segment(g, y, x, 256).matrix();
  EXPECT_LT((r * back - Mat::Identity(3, 3)).norm(), 1e-10);
}

TEST(Transport, ConstantConnectionMatchesExponential) {
  const auto g1 = lie::hat(Eigen::Vector3d(0.4, -0.1, 0.3));
  const auto g2 = lie::hat(Eigen::Vector3d(-0.2, 0.5, 0.2));
  const ConnectionForm g = ConnectionForm::constant({g1, g2});
  const Point x = pt(0.1, 0.2), y = pt(-0.7, 1.1);
  const Eigen::MatrixXd oracle = Eigen::MatrixXd((y - x)(0) * g1.matrix() + (y - x)(1) * g2.matrix()).exp();
  EXPECT_LT((Eigen::MatrixXd(transport_segment(g, x, y, 256).matrix()) - oracle).norm(), 1e-11);
}

TEST(Transport, UnitTriangleHolonomyEqualsFlux) {
  const InequalityCheck c = holonomy_triangle(flux(1.0), pt(0, 0), pt(1, 0), pt(0, 1), 256);
  EXPECT_NEAR(c.lhs, 2.0 * std::sin(0.25), 1e-9);
  EXPECT_NEAR(c.rhs, 0.5, 1e-12);
  EXPECT_DOUBLE_EQ(triangle_area(pt(0, 0), pt(2, 0), pt(0, 3)), 3.0);
}

TEST(Transport, SimpsonWeightsIntegrateCubicsExactly) {
  const int steps = 10;
  const double h = 0.1;
  double sum = 0.0, cubic = 0.0;
  for (int k = 0; k <= steps; ++k) {
    sum += simpson_weight(k, steps, h);
    cubic += simpson_weight(k, steps, h) * std::pow(k * h, 3);
  }
  EXPECT_NEAR(sum, 1.0, 1e-15);
  EXPECT_NEAR(cubic, 0.25, 1e-15);
}

TEST(Transport, ParameterIdentityHoldsForFlux) {
  const Homotopy h = Homotopy::make(
      2, [](double t, double s) { return pt(t, s * t * (1 - t)); }, 0.0, 1.0);
  const ParameterDerivative pd = transport_parameter_derivative(flux(1.3), h, 0.5, 256);
  EXPECT_LT((pd.lhs - pd.rhs).norm(), 1e-7);
  EXPECT_LE(lie::op_norm(pd.lhs), pd.bound * 1.05);
}

TEST(Transport, FtcRequiresEvenSteps) {
  const Field u = make_field({{"family", "gaussian-bump"}}, 2, 2);
  EXPECT_THROW(ftc_reconstruct(flux(1.0), u, Path::segment(pt(0, 0), pt(1, 1)), 15), Error);
  EXPECT_LT(ftc_reconstruct(flux(1.0), u, Path::segment(pt(0, 0), pt(1, 1)), 256).defect, 1e-8);
}
