#include <gtest/gtest.h>

#include "gaugetrace/error.hpp"
#include "gaugetrace/registry.hpp"
#include "gaugetrace/sobolev.hpp"
#include "gaugetrace/trace_ext.hpp"

using namespace gaugetrace;

namespace {

QuadratureSpec small_grid() {
  QuadratureSpec q;
  q.lateral_half_width = 3.0;
  q.lateral_cells = 16;
  q.height = 1.0;
  q.vertical_cells = 16;
  return q;
}

Field bump(int d, int m) { return make_field({{"family", "gaussian-bump"}, {"radius", 1.5}}, d, m); }

}  // namespace

TEST(Sobolev, ParamsRejectInadmissibleWeights) {
  EXPECT_THROW(GagliardoParams(1, 0.0, 2.0), Error);
  EXPECT_THROW(GagliardoParams(1, 1.0, 2.0), Error);
  EXPECT_THROW(require_admissible_weight(2.0, 1.5), Error);
  EXPECT_THROW(require_admissible_weight(2.0, -1.0), Error);
  const GagliardoParams ok(2, 0.5, 3.0);
  EXPECT_DOUBLE_EQ(ok.weight_exponent(), 0.5);
  EXPECT_DOUBLE_EQ(ok.kernel_exponent(), 3.5);
}

TEST(Sobolev, FlatSeminormMatchesBruteForceDoubleSum) {
  const QuadratureSpec q = small_grid();
  const Field u = trace(bump(2, 1));
  const GagliardoParams params(1, 0.5, 2.0);
  const SeminormResult r = gagliardo_seminorm(u, ConnectionForm::zero(1, 1), params, q, 16);
  const double h = q.lateral_cell();
  double sum = 0.0;
  for (int i = 0; i < q.lateral_cells; ++i) {
    for (int j = 0; j < q.lateral_cells; ++j) {
      if (std::abs(i - j) < q.exclusion_radius) continue;
      Point x(1), y(1);
      x << -q.lateral_half_width + (i + 0.5) * h;
      y << -q.lateral_half_width + (j + 0.5) * h;
      sum += h * h * std::pow(std::abs(u.value(x)(0) - u.value(y)(0)), 2) / std::pow(std::abs(x(0) - y(0)), 2.0);
    }
  }
  EXPECT_NEAR(r.power, sum, 1e-12 * sum);
  EXPECT_NEAR(r.value, std::sqrt(sum), 1e-12);
}

TEST(Sobolev, SeminormOfConstantTransportedSectionVanishes) {
  // A constant connection's transport of a parallel section leaves no difference.
  const ConnectionForm zero = ConnectionForm::zero(1, 2);
  const Field flat = Field::analytic(1, 2, [](const Point&) { return FiberVec::Constant(2, 0.0); });
  EXPECT_EQ(gagliardo_seminorm(flat, zero, GagliardoParams(1, 0.5, 2.0), small_grid(), 16).power, 0.0);
}

TEST(Sobolev, WeightedMassOfConstantField) {
  QuadratureSpec q = small_grid();
  q.vertical_cells = 64;
  const Field one = Field::analytic(2, 1, [](const Point&) { return FiberVec::Constant(1, 1.0); });
  const double alpha = -0.5;
  const WeightedEnergy e = weighted_w1p_energy(one, ConnectionForm::zero(2, 1), 2.0, alpha, q);
  const auto z = graded_nodes(q.height, q.vertical_cells, q.grading);
  double midpoint = 0.0;
  for (std::size_t j = 0; j + 1 < z.size(); ++j) midpoint += (z[j + 1] - z[j]) * std::pow(0.5 * (z[j] + z[j + 1]), alpha);
  EXPECT_NEAR(e.mass_term, 2.0 * q.lateral_half_width * midpoint, 1e-12);
  // Exact value (2L) H^{alpha+1} / (alpha+1); the singular weight costs accuracy in the first cell.
  EXPECT_NEAR(e.mass_term, 6.0 * 2.0, 0.01 * 12.0);
  EXPECT_NEAR(e.grad_term, 0.0, 1e-20);
}

TEST(Sobolev, DiamagneticDefectIsNonPositive) {
  const ConnectionForm g = make_connection({{"family", "flux-abelian"}, {"B", 1.0}}, 2, 2);
  EXPECT_LE(diamagnetic_defect(make_field({{"family", "gaussian-bump"}, {"twist", 0.8}}, 2, 2), g, small_grid()),
            1e-6);
}

TEST(Trace, MollifierIsNormalised) {
  for (int n : {1, 2}) {
    const Mollifier phi(n);
    const int cells = 400;
    const double h = 2.0 / cells;
    double sum = 0.0;
    for (int i = 0; i < cells; ++i) {
      for (int j = 0; j < (n == 2 ? cells : 1); ++j) {
        Point y(n);
        y(0) = -1.0 + (i + 0.5) * h;
        if (n == 2) y(1) = -1.0 + (j + 0.5) * h;
        sum += phi(y) * (n == 2 ? h * h : h);
      }
    }
    EXPECT_NEAR(sum, 1.0, 1e-6) << n;
    Point outside = Point::Constant(n, 0.9);
    if (n == 2) EXPECT_EQ(phi(outside), 0.0);
  }
}

TEST(Trace, ExtensionRejectsSmallBeta) {
  const ConnectionForm g = make_connection({{"family", "flux-abelian"}, {"B", 1.0}}, 2, 2);
  ExtensionConfig cfg;
  cfg.grid = small_grid();
  cfg.beta = 0.5;
  try {
    extend(trace(bump(2, 2)), g, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InadmissibleBeta);
  }
}

TEST(Trace, ExtensionOfFlatDataIsDampedConstantUnderZeroConnection) {
  const ConnectionForm zero = ConnectionForm::zero(2, 1);
  ExtensionConfig cfg;
  cfg.grid = small_grid();
  cfg.beta = 1.0;
  const Field u = trace(bump(2, 1));
  const Field e = extend(u, zero, cfg);
  const RectilinearGrid& grid = e.grid();
  // At the centre the mollified bump is below its peak and the damping is e^{-z^2}.
  for (std::size_t node = 0; node < grid.node_count(); ++node) {
    const Point x = grid.node(node);
    EXPECT_LE(std::abs(e.node_value(node)(0)), std::exp(-x(1) * x(1)) * 1.0 + 1e-12);
  }
  EXPECT_LT(first_layer_attainment(e, u), 0.05);
}

TEST(Trace, AutoBetaScalesMeasuredCurvature) {
  const ConnectionForm g = make_connection({{"family", "flux-abelian"}, {"B", 2.0}}, 2, 2);
  Point lo(2), hi(2);
  lo << -1, 0;
  hi << 1, 1;
  EXPECT_NEAR(auto_beta(g, Box{lo, hi}, 16), 2.1, 1e-9);
  EXPECT_NEAR(auto_beta(g, Box{lo, hi}, 16, 2.0), 1.05 * 2.25, 1e-9);
}
