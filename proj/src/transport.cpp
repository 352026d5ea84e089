#include "gaugetrace/transport.hpp"

#include <algorithm>
#include <cmath>

#include "gaugetrace/error.hpp"

namespace gaugetrace {

namespace {

constexpr double kPathStep = 1e-4;

Vec diff_in_t(const std::function<Point(double)>& f, double t) {
  // One-sided near the ends so the stencil stays in [0, 1].
  const double h = kPathStep;
  if (t - 2 * h < 0.0) return Vec((-3.0 * f(t) + 4.0 * f(t + h) - f(t + 2 * h)) / (2.0 * h));
  if (t + 2 * h > 1.0) return Vec((3.0 * f(t) - 4.0 * f(t - h) + f(t - 2 * h)) / (2.0 * h));
  return Vec((-f(t + 2 * h) + 8.0 * f(t + h) - 8.0 * f(t - h) + f(t - 2 * h)) / (12.0 * h));
}

}  // namespace

Path Path::segment(const Point& x, const Point& y) {
  if (x.size() != y.size()) fail(ErrorKind::DimensionMismatch, "segment endpoints differ in dimension");
  Path p;
  p.dim_ = static_cast<int>(x.size());
  p.name_ = "segment";
  p.position_ = [x, y](double t) { return Point((1.0 - t) * x + t * y); };
  const Vec v = y - x;
  p.velocity_ = [v](double) { return v; };
  return p;
}

Path Path::analytic(int dim, PositionFn position, VelocityFn velocity, std::string name) {
  if (!position) fail(ErrorKind::InvalidArgument, "analytic path needs a position function");
  Path p;
  p.dim_ = dim;
  p.name_ = std::move(name);
  p.position_ = std::move(position);
  p.velocity_ = std::move(velocity);
  return p;
}

Path Path::piecewise_linear(std::vector<Point> nodes) {
  if (nodes.size() < 2) fail(ErrorKind::InvalidArgument, "piecewise-linear path needs two nodes");
  const int dim = static_cast<int>(nodes.front().size());
  for (const auto& n : nodes) {
    if (n.size() != dim) fail(ErrorKind::DimensionMismatch, "piecewise-linear path nodes differ in dimension");
  }
  auto shared = std::make_shared<const std::vector<Point>>(std::move(nodes));
  const int pieces = static_cast<int>(shared->size()) - 1;
  auto locate = [pieces](double t, double& local) {
    const double u = std::clamp(t, 0.0, 1.0) * pieces;
    const int k = std::min(static_cast<int>(u), pieces - 1);
    local = u - k;
    return k;
  };
  Path p;
  p.dim_ = dim;
  p.name_ = "piecewise-linear";
  p.position_ = [shared, locate](double t) {
    double u = 0.0;
    const int k = locate(t, u);
    return Point((1.0 - u) * (*shared)[k] + u * (*shared)[k + 1]);
  };
  p.velocity_ = [shared, locate, pieces](double t) {
    double u = 0.0;
    const int k = locate(t, u);
    return Vec(pieces * ((*shared)[k + 1] - (*shared)[k]));
  };
  return p;
}

Vec Path::velocity(double t) const {
  if (velocity_) return velocity_(t);
  return diff_in_t(position_, t);
}

Homotopy Homotopy::make(int dim, Fn position, double s_lo, double s_hi, Fn dt, Fn ds) {
  if (!position) fail(ErrorKind::InvalidArgument, "homotopy needs a position function");
  if (!(s_hi > s_lo)) fail(ErrorKind::InvalidArgument, "homotopy parameter range is empty");
  Homotopy h;
  h.dim_ = dim;
  h.position_ = std::move(position);
  h.s_lo_ = s_lo;
  h.s_hi_ = s_hi;
  h.dt_ = std::move(dt);
  h.ds_ = std::move(ds);
  return h;
}

Vec Homotopy::dt(double t, double s) const {
  if (dt_) return dt_(t, s);
  return diff_in_t([this, s](double u) { return position_(u, s); }, t);
}

Vec Homotopy::ds(double t, double s) const {
  if (ds_) return ds_(t, s);
  const double h = kPathStep * (s_hi_ - s_lo_);
  auto f = [this, t](double u) { return position_(t, u); };
  return Vec((-f(s + 2 * h) + 8.0 * f(s + h) - 8.0 * f(s - h) + f(s - 2 * h)) / (12.0 * h));
}

Path Homotopy::slice(double s) const {
  const Homotopy self = *this;
  return Path::analytic(
      dim_, [self, s](double t) { return self.position(t, s); }, [self, s](double t) { return self.dt(t, s); },
      "slice");
}

TransportResult transport_path(const ConnectionForm& gamma, const Path& path, int steps) {
  if (steps < 8) fail(ErrorKind::InvalidArgument, "transport needs at least 8 steps");
  if (path.dim() != gamma.dim_domain()) fail(ErrorKind::DimensionMismatch, "path and connection dimensions");
  const int m = gamma.dim_fiber();
  const double h = 1.0 / steps;
  auto generator = [&](double t) { return gamma.eval_matrix(path.position(t), path.velocity(t)); };

  TransportResult out;
  out.steps = steps;
  std::vector<Mat> states(steps + 1);
  states[steps] = Mat::Identity(m, m);
  Mat p = states[steps];
  Mat g_hi = generator(1.0);
  for (int k = steps; k > 0; --k) {
    const double t = k * h;
    // Backward step of P' = -G(t) P from t to t - h.
    const Mat g_mid = generator(t - 0.5 * h);
    const Mat g_lo = generator(t - h);
    const Mat k1 = -g_hi * p;
    const Mat k2 = -g_mid * (p - 0.5 * h * k1);
    const Mat k3 = -g_mid * (p - 0.5 * h * k2);
    const Mat k4 = -g_lo * (p - h * k3);
    const Mat next = p - (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    try {
      p = lie::polar_retract(next).matrix();
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::SingularInput) throw;
      fail(ErrorKind::IntegrationDiverged, "transport step left the orthogonal group neighbourhood");
    }
    states[k - 1] = p;
    g_hi = g_lo;
  }
  out.samples.reserve(steps + 1);
  for (int k = 0; k <= steps; ++k) {
    out.ortho_defect = std::max(out.ortho_defect, lie::orthogonality_defect(states[k]));
    out.samples.push_back({k * h, lie::OrthoOp(states[k], 1e-10)});
  }
  return out;
}

lie::OrthoOp transport_segment(const ConnectionForm& gamma, const Point& x, const Point& y, int steps) {
  return transport_path(gamma, Path::segment(x, y), steps).at_start();
}

double simpson_weight(int k, int steps, double h) {
  if (k == 0 || k == steps) return h / 3.0;
  return (k % 2 == 1 ? 4.0 : 2.0) * h / 3.0;
}

namespace {

void require_even(int steps) {
  if (steps % 2 != 0) fail(ErrorKind::InvalidArgument, "Simpson quadrature needs an even step count");
}

}  // namespace

FtcResult ftc_reconstruct(const ConnectionForm& gamma, const Field& field, const Path& path, int steps) {
  require_even(steps);
  const TransportResult tr = transport_path(gamma, path, steps);
  const double h = 1.0 / steps;
  FtcResult out;
  out.reconstructed = tr.at_start().matrix().transpose() * field.value(path.position(0.0));
  for (int k = 0; k <= steps; ++k) {
    const double t = k * h;
    const Mat du = covariant_derivative(field, gamma, path.position(t));
    out.reconstructed += simpson_weight(k, steps, h) * (tr.samples[k].op.matrix().transpose() * (du * path.velocity(t)));
  }
  out.endpoint = field.value(path.position(1.0));
  out.defect = (out.reconstructed - out.endpoint).norm();
  return out;
}

ParameterDerivative transport_parameter_derivative(const ConnectionForm& gamma, const Homotopy& hom, double s,
                                                   int steps) {
  require_even(steps);
  const double hs = 1e-4 * (hom.s_hi() - hom.s_lo());
  if (s - hs < hom.s_lo() || s + hs > hom.s_hi()) {
    fail(ErrorKind::StencilOutOfRange, "parameter derivative stencil leaves the homotopy range");
  }
  const TransportResult tr = transport_path(gamma, hom.slice(s), steps);
  const Mat p0 = tr.at_start().matrix();
  const Mat plus = transport_path(gamma, hom.slice(s + hs), steps).at_start().matrix();
  const Mat minus = transport_path(gamma, hom.slice(s - hs), steps).at_start().matrix();

  ParameterDerivative out;
  out.lhs = (plus - minus) / (2.0 * hs) + gamma.eval_matrix(hom.position(0.0, s), hom.ds(0.0, s)) * p0 -
            p0 * gamma.eval_matrix(hom.position(1.0, s), hom.ds(1.0, s));

  const int m = gamma.dim_fiber();
  const double h = 1.0 / steps;
  out.rhs = Mat::Zero(m, m);
  for (int k = 0; k <= steps; ++k) {
    const double t = k * h;
    const Mat kt = curvature(gamma, hom.position(t, s), hom.ds(t, s), hom.dt(t, s)).matrix();
    const Mat& pt = tr.samples[k].op.matrix();
    const double w = simpson_weight(k, steps, h);
    out.rhs += w * (p0 * pt.transpose() * kt * pt);
    out.bound += w * lie::op_norm(kt);
  }
  return out;
}

double triangle_area(const Point& x, const Point& y, const Point& z) {
  const Vec a = y - x;
  const Vec b = z - x;
  const double gram = a.squaredNorm() * b.squaredNorm() - a.dot(b) * a.dot(b);
  return 0.5 * std::sqrt(std::max(gram, 0.0));
}

namespace {

Box bounding_box(const Point& x, const Point& y, const Point& z) {
  return Box{Point(x.cwiseMin(y).cwiseMin(z)), Point(x.cwiseMax(y).cwiseMax(z))};
}

}  // namespace

InequalityCheck holonomy_triangle(const ConnectionForm& gamma, const Point& x, const Point& y, const Point& z,
                                  int steps, int curvature_samples) {
  const Mat loop = transport_segment(gamma, x, y, steps).matrix() * transport_segment(gamma, y, z, steps).matrix() *
                   transport_segment(gamma, z, x, steps).matrix();
  const int m = gamma.dim_fiber();
  InequalityCheck out;
  out.lhs = lie::op_norm(Mat(Mat::Identity(m, m) - loop));
  const double area = triangle_area(x, y, z);
  out.rhs = area > 0.0 ? curvature_sup_norm(gamma, bounding_box(x, y, z), curvature_samples) * area : 0.0;
  return out;
}

InequalityCheck triangle_difference_bound(const ConnectionForm& gamma, const Field& field, const Point& x,
                                          const Point& y, const Point& z, int steps, int curvature_samples) {
  const FiberVec ux = field.value(x);
  const FiberVec uy = field.value(y);
  const FiberVec uz = field.value(z);
  InequalityCheck out;
  out.lhs = (ux - transport_segment(gamma, x, y, steps).apply(uy)).norm();
  const double area = triangle_area(x, y, z);
  const double holonomy =
      area > 0.0 ? curvature_sup_norm(gamma, bounding_box(x, y, z), curvature_samples) * area : 0.0;
  out.rhs = (ux - transport_segment(gamma, x, z, steps).apply(uz)).norm() +
            (uy - transport_segment(gamma, y, z, steps).apply(uz)).norm() + uz.norm() * std::min(2.0, holonomy);
  return out;
}

}  // namespace gaugetrace
