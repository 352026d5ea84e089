#pragma once

#include <functional>
#include <string>
#include <vector>

#include "gaugetrace/connection.hpp"
#include "gaugetrace/field.hpp"
#include "gaugetrace/lie.hpp"

namespace gaugetrace {

/// Slack applied to every asserted inequality that involves quadrature or
/// finite differences.
inline constexpr double kDiscretizationSlack = 0.05;

/// C^1 curve t -> gamma(t), t in [0, 1].
class Path {
 public:
  using PositionFn = std::function<Point(double)>;
  using VelocityFn = std::function<Vec(double)>;

  Path() = default;
  /// t -> (1 - t) x + t y.
  static Path segment(const Point& x, const Point& y);
  /// Velocity defaults to a fourth-order difference of `position`.
  static Path analytic(int dim, PositionFn position, VelocityFn velocity = {}, std::string name = "analytic");
  /// Uniform-in-parameter polyline through `nodes` (at least two).
  static Path piecewise_linear(std::vector<Point> nodes);

  int dim() const { return dim_; }
  const std::string& name() const { return name_; }
  Point position(double t) const { return position_(t); }
  Vec velocity(double t) const;

 private:
  int dim_ = 0;
  std::string name_;
  PositionFn position_;
  VelocityFn velocity_;
};

/// Family of paths (t, s) -> H(t, s), s in [s_lo, s_hi].
class Homotopy {
 public:
  using Fn = std::function<Point(double, double)>;

  Homotopy() = default;
  /// `dt` and `ds` are the partial derivatives; missing ones are differenced.
  static Homotopy make(int dim, Fn position, double s_lo, double s_hi, Fn dt = {}, Fn ds = {});

  int dim() const { return dim_; }
  double s_lo() const { return s_lo_; }
  double s_hi() const { return s_hi_; }
  Point position(double t, double s) const { return position_(t, s); }
  Vec dt(double t, double s) const;
  Vec ds(double t, double s) const;
  Path slice(double s) const;

 private:
  int dim_ = 0;
  double s_lo_ = 0.0;
  double s_hi_ = 1.0;
  Fn position_;
  Fn dt_;
  Fn ds_;
};

struct TransportSample {
  double t;
  lie::OrthoOp op;
};

struct TransportResult {
  /// samples[k] is at t = k / steps; samples.back() is (1, identity).
  std::vector<TransportSample> samples;
  int steps = 0;
  double ortho_defect = 0.0;

  const lie::OrthoOp& at_start() const { return samples.front().op; }
};

/// Solves P' + Gamma(gamma)[gamma'] P = 0, P(1) = I backward in t with
/// classical RK4 and a polar retraction after every step.
TransportResult transport_path(const ConnectionForm& gamma, const Path& path, int steps);

/// R(x, y): transport along the segment from x to y, evaluated at t = 0.
lie::OrthoOp transport_segment(const ConnectionForm& gamma, const Point& x, const Point& y, int steps);

struct FtcResult {
  FiberVec reconstructed;  // P(0)^{-1} U(gamma(0)) + int P(t)^{-1} D_G U[gamma'] dt
  FiberVec endpoint;       // U(gamma(1))
  double defect = 0.0;
};

/// Requires an even step count (composite Simpson on the ODE grid).
FtcResult ftc_reconstruct(const ConnectionForm& gamma, const Field& field, const Path& path, int steps);

struct ParameterDerivative {
  Mat lhs;
  Mat rhs;
  double bound = 0.0;
};

/// Both sides of the parameter-derivative identity for the start-point
/// transport of the slice at s, plus the curvature bound on |lhs|.
ParameterDerivative transport_parameter_derivative(const ConnectionForm& gamma, const Homotopy& h, double s,
                                                   int steps);

struct InequalityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds(double slack = kDiscretizationSlack) const { return lhs <= rhs * (1.0 + slack) + 1e-12; }
};

/// Area of the triangle spanned by x, y, z in R^d.
double triangle_area(const Point& x, const Point& y, const Point& z);

/// lhs = |I - R(x,y) R(y,z) R(z,x)|, rhs = sup|K| over the bounding box times the area.
InequalityCheck holonomy_triangle(const ConnectionForm& gamma, const Point& x, const Point& y, const Point& z,
                                  int steps, int curvature_samples = 64);

/// |U(x) - R(x,y)U(y)| against the two-leg estimate through z.
InequalityCheck triangle_difference_bound(const ConnectionForm& gamma, const Field& field, const Point& x,
                                          const Point& y, const Point& z, int steps, int curvature_samples = 64);

/// Composite Simpson weight of node k on an even grid of `steps` intervals of width h.
double simpson_weight(int k, int steps, double h);

}  // namespace gaugetrace
