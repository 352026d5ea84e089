#include "gaugetrace/connection.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "gaugetrace/error.hpp"

namespace gaugetrace {

// ---------------------------------------------------------------- GaugeField

GaugeField GaugeField::make(int dim_domain, int dim_fiber, ValueFn value, DerivativeFn derivative) {
  if (!value) fail(ErrorKind::InvalidArgument, "GaugeField requires a value function");
  GaugeField g;
  g.dim_domain_ = dim_domain;
  g.dim_fiber_ = dim_fiber;
  g.value_ = std::move(value);
  g.derivative_ = std::move(derivative);
  return g;
}

GaugeField GaugeField::identity(int dim_domain, int dim_fiber) {
  return make(
      dim_domain, dim_fiber, [dim_fiber](const Point&) { return Mat(Mat::Identity(dim_fiber, dim_fiber)); },
      [dim_fiber](const Point&, const Vec&) { return Mat(Mat::Zero(dim_fiber, dim_fiber)); });
}

GaugeField GaugeField::exp_product(int dim_domain, std::vector<Factor> factors) {
  if (factors.empty()) fail(ErrorKind::InvalidArgument, "exp_product needs at least one factor");
  const int m = factors.front().generator.dim();
  for (const auto& f : factors) {
    if (f.generator.dim() != m) fail(ErrorKind::DimensionMismatch, "exp_product: generator dimensions differ");
  }
  auto shared = std::make_shared<const std::vector<Factor>>(std::move(factors));
  auto value = [shared, m](const Point& x) {
    Mat out = Mat::Identity(m, m);
    for (const auto& f : *shared) out = out * lie::expm(f.generator * f.angle(x)).matrix();
    return out;
  };
  DerivativeFn derivative;
  bool analytic = true;
  for (const auto& f : *shared) analytic = analytic && bool(f.gradient);
  if (analytic) {
    // Product rule: sum_k E_1..E_{k-1} (da_k[v] G_k E_k) E_{k+1}..
    derivative = [shared, m](const Point& x, const Vec& v) {
      const std::size_t k = shared->size();
      std::vector<Mat> e(k);
      for (std::size_t i = 0; i < k; ++i) e[i] = lie::expm((*shared)[i].generator * (*shared)[i].angle(x)).matrix();
      Mat out = Mat::Zero(m, m);
      for (std::size_t i = 0; i < k; ++i) {
        Mat term = Mat::Identity(m, m);
        for (std::size_t j = 0; j < k; ++j) {
          if (j == i) {
            term = term * ((*shared)[i].gradient(x).dot(v) * (*shared)[i].generator.matrix() * e[i]);
          } else {
            term = term * e[j];
          }
        }
        out += term;
      }
      return out;
    };
  }
  return make(dim_domain, m, std::move(value), std::move(derivative));
}

lie::OrthoOp GaugeField::value(const Point& x) const { return lie::OrthoOp(value_(x), 1e-10); }

Mat GaugeField::derivative(const Point& x, const Vec& v) const {
  if (derivative_) return derivative_(x, v);
  auto f = [this](const Point& p) { return Mat(value_(p)); };
  return central_difference4(f, x, v, fd_step_);
}

GaugeField GaugeField::with_fd_step(double step) const {
  GaugeField g = *this;
  g.fd_step_ = step;
  return g;
}

GaugeField GaugeField::restrict_to_boundary() const {
  const GaugeField outer = *this;
  const int n = dim_domain_ - 1;
  auto lift = [n](const Point& x) {
    Point p = Point::Zero(n + 1);
    p.head(n) = x;
    return p;
  };
  DerivativeFn derivative;
  if (derivative_) {
    derivative = [outer, lift, n](const Point& x, const Vec& v) {
      Vec w = Vec::Zero(n + 1);
      w.head(n) = v;
      return outer.derivative(lift(x), w);
    };
  }
  GaugeField g = make(
      n, dim_fiber_, [outer, lift](const Point& x) { return Mat(outer.value_(lift(x))); }, std::move(derivative));
  g.fd_step_ = fd_step_;
  return g;
}

// --------------------------------------------------------------------- Chart

Chart Chart::make(int dim, std::string name, MapFn map, JacobianFn jacobian, MapFn inverse) {
  if (!map || !jacobian) fail(ErrorKind::InvalidArgument, "Chart requires map and Jacobian");
  Chart c;
  c.dim_ = dim;
  c.name_ = std::move(name);
  c.map_ = std::move(map);
  c.jacobian_ = std::move(jacobian);
  c.inverse_ = std::move(inverse);
  return c;
}

Chart Chart::identity(int dim) {
  return make(
      dim, "identity", [](const Point& x) { return x; },
      [dim](const Point&) { return Mat(Mat::Identity(dim, dim)); }, [](const Point& y) { return y; });
}

Chart Chart::dilation(int dim, double factor) {
  if (factor == 0.0) fail(ErrorKind::InvalidArgument, "dilation factor must be nonzero");
  return make(
      dim, "dilation", [factor](const Point& x) { return Point(factor * x); },
      [dim, factor](const Point&) { return Mat(factor * Mat::Identity(dim, dim)); },
      [factor](const Point& y) { return Point(y / factor); });
}

Chart Chart::linear(const Mat& matrix, std::string name) {
  const int dim = static_cast<int>(matrix.rows());
  const Mat inv = matrix.inverse();
  return make(
      dim, std::move(name), [matrix](const Point& x) { return Point(matrix * x); },
      [matrix](const Point&) { return matrix; }, [inv](const Point& y) { return Point(inv * y); });
}

Chart Chart::shear(int dim, double amplitude) {
  const int last = dim - 1;
  return make(
      dim, "shear",
      [amplitude, last](const Point& x) {
        Point y = x;
        y(0) += amplitude * std::sin(x(last));
        return y;
      },
      [dim, amplitude, last](const Point& x) {
        Mat j = Mat::Identity(dim, dim);
        j(0, last) += amplitude * std::cos(x(last));
        return j;
      },
      [amplitude, last](const Point& y) {
        Point x = y;
        x(0) -= amplitude * std::sin(y(last));
        return x;
      });
}

Mat Chart::jacobian(const Point& x) const {
  Mat j = jacobian_(x);
  Eigen::JacobiSVD<Mat> svd(j);
  const auto& s = svd.singularValues();
  const double smin = s(s.size() - 1);
  if (!(smin > 0.0) || s(0) / smin >= kMaxCondition) {
    fail(ErrorKind::InvalidArgument, "chart Jacobian is singular or ill-conditioned");
  }
  return j;
}

std::optional<Point> Chart::inverse(const Point& y) const {
  if (!inverse_) return std::nullopt;
  return inverse_(y);
}

// ------------------------------------------------------------ ConnectionForm

ConnectionForm::Impl::Impl(int dim_domain, int dim_fiber, Box domain)
    : dim_domain_(dim_domain), dim_fiber_(dim_fiber), domain_(std::move(domain)) {
  if (dim_domain < 1 || dim_domain > kMaxDim || dim_fiber < 1 || dim_fiber > kMaxDim) {
    fail(ErrorKind::DimensionMismatch, "connection dimensions must be in 1..4");
  }
}

std::optional<Mat> ConnectionForm::Impl::analytic_derivative(const Point&, const Vec&, const Vec&) const {
  return std::nullopt;
}

namespace {

Mat combine(const std::vector<lie::SkewMap>& coefficients, const Vec& v, int m) {
  Mat out = Mat::Zero(m, m);
  for (int i = 0; i < v.size(); ++i) out += v(i) * coefficients[i].matrix();
  return out;
}

class ZeroImpl final : public ConnectionForm::Impl {
 public:
  ZeroImpl(int d, int m) : Impl(d, m, Box::unbounded(d)) {}
  Mat eval(const Point&, const Vec&) const override { return Mat::Zero(dim_fiber(), dim_fiber()); }
  std::optional<Mat> analytic_derivative(const Point&, const Vec&, const Vec&) const override {
    return Mat(Mat::Zero(dim_fiber(), dim_fiber()));
  }
  std::string describe() const override { return "zero"; }
};

class ConstantImpl final : public ConnectionForm::Impl {
 public:
  explicit ConstantImpl(std::vector<lie::SkewMap> g)
      : Impl(static_cast<int>(g.size()), g.empty() ? 1 : g.front().dim(), Box::unbounded(static_cast<int>(g.size()))),
        g_(std::move(g)) {}
  Mat eval(const Point&, const Vec& v) const override { return combine(g_, v, dim_fiber()); }
  std::optional<Mat> analytic_derivative(const Point&, const Vec&, const Vec&) const override {
    return Mat(Mat::Zero(dim_fiber(), dim_fiber()));
  }
  std::string describe() const override { return "constant"; }

 private:
  std::vector<lie::SkewMap> g_;
};

class AbelianImpl final : public ConnectionForm::Impl {
 public:
  AbelianImpl(int d, std::function<Vec(const Point&)> a, std::function<Mat(const Point&)> da, std::string name)
      : Impl(d, 2, Box::unbounded(d)), a_(std::move(a)), da_(std::move(da)), name_(std::move(name)) {}
  Mat eval(const Point& x, const Vec& v) const override {
    return a_(x).dot(v) * lie::complex_unit().matrix();
  }
  std::optional<Mat> analytic_derivative(const Point& x, const Vec& v, const Vec& w) const override {
    if (!da_) return std::nullopt;
    // d/dt A(x + t v) . w = w^T DA(x) v
    return Mat(w.dot(da_(x) * v) * lie::complex_unit().matrix());
  }
  std::string describe() const override { return name_; }

 private:
  std::function<Vec(const Point&)> a_;
  std::function<Mat(const Point&)> da_;
  std::string name_;
};

class AffineImpl final : public ConnectionForm::Impl {
 public:
  AffineImpl(std::vector<lie::SkewMap> base, std::vector<std::vector<lie::SkewMap>> slopes)
      : Impl(static_cast<int>(base.size()), base.front().dim(), Box::unbounded(static_cast<int>(base.size()))),
        base_(std::move(base)), slopes_(std::move(slopes)) {}
  Mat eval(const Point& x, const Vec& v) const override {
    const int m = dim_fiber();
    Mat out = Mat::Zero(m, m);
    for (int i = 0; i < dim_domain(); ++i) {
      Mat gi = base_[i].matrix();
      for (int k = 0; k < dim_domain(); ++k) gi += x(k) * slopes_[i][k].matrix();
      out += v(i) * gi;
    }
    return out;
  }
  std::optional<Mat> analytic_derivative(const Point&, const Vec& v, const Vec& w) const override {
    const int m = dim_fiber();
    Mat out = Mat::Zero(m, m);
    for (int i = 0; i < dim_domain(); ++i) {
      for (int k = 0; k < dim_domain(); ++k) out += w(i) * v(k) * slopes_[i][k].matrix();
    }
    return out;
  }
  std::string describe() const override { return "affine"; }

 private:
  std::vector<lie::SkewMap> base_;
  std::vector<std::vector<lie::SkewMap>> slopes_;
};

class SampledImpl final : public ConnectionForm::Impl {
 public:
  SampledImpl(RectilinearGrid grid, int m, std::vector<double> values)
      : Impl(grid.dim(), m, grid.box()), grid_(std::move(grid)), values_(std::move(values)) {}
  Mat eval(const Point& x, const Vec& v) const override {
    RectilinearGrid::Stencil st;
    if (!grid_.stencil(x, st)) fail(ErrorKind::OutOfDomain, "sampled connection: point outside grid");
    const int d = dim_domain();
    const int m = dim_fiber();
    const std::size_t stride = static_cast<std::size_t>(d) * m * m;
    Mat out = Mat::Zero(m, m);
    for (int c = 0; c < st.count; ++c) {
      const double* base = values_.data() + st.nodes[c] * stride;
      for (int i = 0; i < d; ++i) {
        const double w = st.weights[c] * v(i);
        if (w == 0.0) continue;
        for (int r = 0; r < m; ++r) {
          for (int col = 0; col < m; ++col) out(r, col) += w * base[i * m * m + r * m + col];
        }
      }
    }
    // Multilinear interpolation keeps skewness only approximately.
    return lie::SkewMap::project(out).matrix();
  }
  std::string describe() const override { return "sampled"; }

 private:
  RectilinearGrid grid_;
  std::vector<double> values_;
};

class GaugeTransformedImpl final : public ConnectionForm::Impl {
 public:
  GaugeTransformedImpl(ConnectionForm inner, GaugeField phi)
      : Impl(inner.dim_domain(), inner.dim_fiber(), inner.domain()), inner_(std::move(inner)), phi_(std::move(phi)) {}
  Mat eval(const Point& x, const Vec& v) const override {
    const lie::OrthoOp phi = phi_.value(x);
    const Mat& q = phi.matrix();
    const Mat out = -phi_.derivative(x, v) * q.transpose() + q * inner_.eval_matrix(x, v) * q.transpose();
    const double scale = std::max(1.0, out.cwiseAbs().maxCoeff());
    if ((out + out.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
      fail(ErrorKind::NonOrthogonalGauge, "gauge-transformed connection is not skew (inconsistent D phi)");
    }
    return lie::SkewMap::project(out).matrix();
  }
  std::string describe() const override { return "gauge-transformed(" + inner_.describe() + ")"; }

 private:
  ConnectionForm inner_;
  GaugeField phi_;
};

class PullbackImpl final : public ConnectionForm::Impl {
 public:
  PullbackImpl(ConnectionForm inner, Chart psi, Box domain)
      : Impl(inner.dim_domain(), inner.dim_fiber(), std::move(domain)), inner_(std::move(inner)), psi_(std::move(psi)) {}
  Mat eval(const Point& x, const Vec& v) const override {
    const Point y = psi_.map(x);
    if (!inner_.domain().contains(y)) fail(ErrorKind::OutOfDomain, "pullback: psi(x) outside connection domain");
    return inner_.eval_matrix(y, Vec(psi_.jacobian(x) * v));
  }
  std::string describe() const override { return "pullback(" + inner_.describe() + ", " + psi_.name() + ")"; }

 private:
  ConnectionForm inner_;
  Chart psi_;
};

class RestrictionImpl final : public ConnectionForm::Impl {
 public:
  explicit RestrictionImpl(ConnectionForm inner)
      : Impl(inner.dim_domain() - 1, inner.dim_fiber(), lateral_box(inner.domain())), inner_(std::move(inner)) {}
  Mat eval(const Point& x, const Vec& v) const override { return inner_.eval_matrix(lift(x), lift(v)); }
  std::optional<Mat> analytic_derivative(const Point& x, const Vec& v, const Vec& w) const override {
    if (!inner_.has_analytic_derivative()) return std::nullopt;
    return inner_.derivative(lift(x), lift(v), lift(w));
  }
  std::string describe() const override { return "boundary(" + inner_.describe() + ")"; }

 private:
  static Box lateral_box(const Box& b) {
    const int n = b.dim() - 1;
    return Box{Point(b.lo.head(n)), Point(b.hi.head(n))};
  }
  Vec lift(const Vec& x) const {
    Vec p = Vec::Zero(x.size() + 1);
    p.head(x.size()) = x;
    return p;
  }
  ConnectionForm inner_;
};

}  // namespace

ConnectionForm::ConnectionForm(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

ConnectionForm ConnectionForm::zero(int dim_domain, int dim_fiber) {
  return ConnectionForm(std::make_shared<ZeroImpl>(dim_domain, dim_fiber));
}

ConnectionForm ConnectionForm::constant(std::vector<lie::SkewMap> coefficients) {
  if (coefficients.empty()) fail(ErrorKind::InvalidArgument, "constant connection needs coefficients");
  for (const auto& g : coefficients) {
    if (g.dim() != coefficients.front().dim()) fail(ErrorKind::DimensionMismatch, "constant connection");
  }
  return ConnectionForm(std::make_shared<ConstantImpl>(std::move(coefficients)));
}

ConnectionForm ConnectionForm::abelian_magnetic(int dim_domain, std::function<Vec(const Point&)> potential,
                                                std::function<Mat(const Point&)> jacobian, std::string name) {
  return ConnectionForm(
      std::make_shared<AbelianImpl>(dim_domain, std::move(potential), std::move(jacobian), std::move(name)));
}

ConnectionForm ConnectionForm::affine(std::vector<lie::SkewMap> base, std::vector<std::vector<lie::SkewMap>> slopes) {
  const std::size_t d = base.size();
  if (d == 0 || slopes.size() != d) fail(ErrorKind::DimensionMismatch, "affine connection: coefficient counts");
  for (const auto& row : slopes) {
    if (row.size() != d) fail(ErrorKind::DimensionMismatch, "affine connection: slope row length");
  }
  return ConnectionForm(std::make_shared<AffineImpl>(std::move(base), std::move(slopes)));
}

ConnectionForm ConnectionForm::sampled(RectilinearGrid grid, int dim_fiber, std::vector<double> values) {
  const std::size_t expected = grid.node_count() * grid.dim() * dim_fiber * dim_fiber;
  if (values.size() != expected) fail(ErrorKind::DimensionMismatch, "sampled connection: value count");
  return ConnectionForm(std::make_shared<SampledImpl>(std::move(grid), dim_fiber, std::move(values)));
}

int ConnectionForm::dim_domain() const { return impl_->dim_domain(); }
int ConnectionForm::dim_fiber() const { return impl_->dim_fiber(); }
const Box& ConnectionForm::domain() const { return domain_ ? *domain_ : impl_->domain(); }
std::string ConnectionForm::describe() const { return impl_->describe(); }

Mat ConnectionForm::eval_matrix(const Point& x, const Vec& v) const {
  if (x.size() != dim_domain() || v.size() != dim_domain()) {
    fail(ErrorKind::DimensionMismatch, "connection evaluated with wrong dimension");
  }
  if (!domain().contains(x, 1e-12)) fail(ErrorKind::OutOfDomain, "connection evaluated outside its domain");
  return impl_->eval(x, v);
}

lie::SkewMap ConnectionForm::eval(const Point& x, const Vec& v) const {
  return lie::SkewMap(eval_matrix(x, v), 1e-12);
}

bool ConnectionForm::has_analytic_derivative() const {
  const Point x = domain().center();
  const Vec e = unit_vector(dim_domain(), 0);
  return impl_->analytic_derivative(x, e, e).has_value();
}

double ConnectionForm::fd_step() const {
  if (fd_step_) return *fd_step_;
  const Box& b = domain();
  return b.bounded() ? 1e-3 * b.diameter() : 1e-3;
}

ConnectionForm ConnectionForm::with_fd_step(double step) const {
  if (!(step > 0.0)) fail(ErrorKind::InvalidArgument, "fd step must be positive");
  ConnectionForm c = *this;
  c.fd_step_ = step;
  return c;
}

ConnectionForm ConnectionForm::with_domain(const Box& domain) const {
  ConnectionForm c = *this;
  c.domain_ = domain;
  return c;
}

Mat ConnectionForm::derivative(const Point& x, const Vec& v, const Vec& w) const {
  if (!domain().contains(x, 1e-12)) fail(ErrorKind::OutOfDomain, "connection derivative outside domain");
  if (auto d = impl_->analytic_derivative(x, v, w)) return *d;
  const double h = fd_step();
  if (!domain().contains(x + 2.0 * h * v, 1e-12) || !domain().contains(x - 2.0 * h * v, 1e-12)) {
    fail(ErrorKind::StencilOutOfRange, "difference stencil leaves the connection domain");
  }
  auto f = [this, &w](const Point& p) { return Mat(impl_->eval(p, w)); };
  return central_difference4(f, x, v, h);
}

// -------------------------------------------------------------- operations

lie::SkewMap eval_connection(const ConnectionForm& gamma, const Point& x, const Vec& v) { return gamma.eval(x, v); }

Mat covariant_derivative(const Field& field, const ConnectionForm& gamma, const Point& x) {
  if (field.dim_domain() != gamma.dim_domain() || field.dim_fiber() != gamma.dim_fiber()) {
    fail(ErrorKind::DimensionMismatch, "covariant_derivative: field and connection dimensions differ");
  }
  const int d = gamma.dim_domain();
  Mat out = field.jacobian(x);
  const FiberVec u = field.value(x);
  for (int i = 0; i < d; ++i) out.col(i) += gamma.eval_matrix(x, unit_vector(d, i)) * u;
  return out;
}

lie::SkewMap curvature(const ConnectionForm& gamma, const Point& x, const Vec& v, const Vec& w) {
  const Mat gv = gamma.eval_matrix(x, v);
  const Mat gw = gamma.eval_matrix(x, w);
  const Mat k = gamma.derivative(x, v, w) - gamma.derivative(x, w, v) + gv * gw - gw * gv;
  return lie::SkewMap::project(k);
}

namespace {

double radical_inverse(std::uint64_t index, unsigned base) {
  double result = 0.0;
  double f = 1.0 / base;
  while (index > 0) {
    result += f * static_cast<double>(index % base);
    index /= base;
    f /= base;
  }
  return result;
}

// Corners and centre first, then a Halton sequence: prefixes are nested.
Point sample_point(const Box& region, int index) {
  const int d = region.dim();
  const int corners = 1 << d;
  Point x(d);
  if (index < corners) {
    for (int k = 0; k < d; ++k) x(k) = ((index >> k) & 1) ? region.hi(k) : region.lo(k);
    return x;
  }
  if (index == corners) return region.center();
  static constexpr unsigned kPrimes[kMaxDim] = {2, 3, 5, 7};
  const auto h = static_cast<std::uint64_t>(index - corners);
  for (int k = 0; k < d; ++k) x(k) = region.lo(k) + radical_inverse(h, kPrimes[k]) * (region.hi(k) - region.lo(k));
  return x;
}

}  // namespace

double curvature_sup_norm(const ConnectionForm& gamma, const Box& region, int samples, std::uint64_t seed) {
  if (samples < 1) fail(ErrorKind::InvalidArgument, "curvature_sup_norm needs samples >= 1");
  if (!region.bounded()) fail(ErrorKind::InvalidArgument, "curvature_sup_norm needs a bounded region");
  const int d = gamma.dim_domain();
  if (d < 2) return 0.0;
  double sup = 0.0;
  for (int s = 0; s < samples; ++s) {
    const Point x = sample_point(region, s);
    // Coordinate-pair curvatures K_ij; K[v, w] = sum_{i<j} (v_i w_j - v_j w_i) K_ij.
    std::vector<Mat> kij;
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < d; ++i) {
      for (int j = i + 1; j < d; ++j) {
        kij.push_back(curvature(gamma, x, unit_vector(d, i), unit_vector(d, j)).matrix());
        pairs.emplace_back(i, j);
        sup = std::max(sup, lie::op_norm(kij.back()));
      }
    }
    if (d == 2) continue;  // every orthonormal pair gives +-K_12
    std::mt19937_64 rng(seed ^ (0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(s + 1)));
    std::normal_distribution<double> normal;
    for (int r = 0; r < 8; ++r) {
      Vec v(d), w(d);
      for (int k = 0; k < d; ++k) v(k) = normal(rng);
      for (int k = 0; k < d; ++k) w(k) = normal(rng);
      v.normalize();
      w -= w.dot(v) * v;
      w.normalize();
      Mat k = Mat::Zero(gamma.dim_fiber(), gamma.dim_fiber());
      for (std::size_t p = 0; p < pairs.size(); ++p) {
        const auto [i, j] = pairs[p];
        k += (v(i) * w(j) - v(j) * w(i)) * kij[p];
      }
      sup = std::max(sup, lie::op_norm(k));
    }
  }
  return sup;
}

ConnectionForm gauge_transform(const ConnectionForm& gamma, const GaugeField& phi) {
  if (phi.dim_domain() != gamma.dim_domain() || phi.dim_fiber() != gamma.dim_fiber()) {
    fail(ErrorKind::DimensionMismatch, "gauge_transform: dimensions differ");
  }
  ConnectionForm out(std::make_shared<GaugeTransformedImpl>(gamma, phi));
  return out.with_fd_step(gamma.fd_step());
}

ConnectionForm pullback(const ConnectionForm& gamma, const Chart& psi, std::optional<Box> domain) {
  if (psi.dim() != gamma.dim_domain()) fail(ErrorKind::DimensionMismatch, "pullback: chart dimension");
  Box dom = domain ? *domain : Box::unbounded(psi.dim());
  ConnectionForm out(std::make_shared<PullbackImpl>(gamma, psi, std::move(dom)));
  return out.with_fd_step(gamma.fd_step());
}

ConnectionForm restrict_to_boundary(const ConnectionForm& gamma) {
  if (gamma.dim_domain() < 2) fail(ErrorKind::DimensionMismatch, "boundary restriction needs d >= 2");
  ConnectionForm out(std::make_shared<RestrictionImpl>(gamma));
  return out.with_fd_step(gamma.fd_step());
}

double commutator_defect(const Field& field, const ConnectionForm& gamma, const Point& x, const Vec& v,
                         const Vec& w, std::optional<double> step) {
  const FiberVec u = field.value(x);
  const Mat gv = gamma.eval_matrix(x, v);
  const Mat gw = gamma.eval_matrix(x, w);
  auto dg = [&](const Point& p, const Vec& dir) {
    return FiberVec(field.jacobian(p) * dir + gamma.eval_matrix(p, dir) * field.value(p));
  };
  FiberVec lhs;
  if (step) {
    const double h = *step;
    auto outer = [&](const Vec& a, const Vec& b, const Mat& ga) {
      // D_G(D_G U[b])[a] with a central difference along a.
      const FiberVec plus = dg(x + h * a, b);
      const FiberVec minus = dg(x - h * a, b);
      return FiberVec((plus - minus) / (2.0 * h) + ga * dg(x, b));
    };
    lhs = outer(v, w, gv) - outer(w, v, gw);
  } else {
    const Mat du = field.jacobian(x);
    auto outer = [&](const Vec& a, const Vec& b, const Mat& ga, const Mat& gb) {
      // D(DU[b] + G[b]U)[a] + G[a](DU[b] + G[b]U)
      const FiberVec d_inner = field.second_derivative(x, a, b) + gamma.derivative(x, a, b) * u + gb * (du * a);
      return FiberVec(d_inner + ga * (du * b + gb * u));
    };
    lhs = outer(v, w, gv, gw) - outer(w, v, gw, gv);
  }
  const FiberVec rhs = curvature(gamma, x, v, w).matrix() * u;
  return (lhs - rhs).norm();
}

Field gauge_apply(const GaugeField& phi, const Field& field) {
  if (phi.dim_fiber() != field.dim_fiber() || phi.dim_domain() != field.dim_domain()) {
    fail(ErrorKind::DimensionMismatch, "gauge_apply: dimensions differ");
  }
  if (field.is_sampled()) {
    const auto& grid = field.grid();
    const int m = field.dim_fiber();
    std::vector<double> values(field.node_values().size());
    for (std::size_t node = 0; node < grid.node_count(); ++node) {
      const FiberVec v = phi.value(grid.node(node)).apply(field.node_value(node));
      for (int c = 0; c < m; ++c) values[node * m + c] = v(c);
    }
    return Field::sampled(grid, m, std::move(values));
  }
  const int d = field.dim_domain();
  Field::JacobianFn jac;
  if (field.has_analytic_jacobian() && phi.has_analytic_derivative()) {
    jac = [phi, field, d](const Point& x) {
      const Mat q = phi.value(x).matrix();
      const FiberVec u = field.value(x);
      Mat out = q * field.jacobian(x);
      for (int i = 0; i < d; ++i) out.col(i) += phi.derivative(x, unit_vector(d, i)) * u;
      return out;
    };
  }
  return Field::analytic(
             d, field.dim_fiber(), [phi, field](const Point& x) { return phi.value(x).apply(field.value(x)); },
             std::move(jac))
      .with_fd_step(field.fd_step());
}

Field compose(const Field& field, const Chart& psi) {
  if (psi.dim() != field.dim_domain()) fail(ErrorKind::DimensionMismatch, "compose: chart dimension");
  return Field::analytic(field.dim_domain(), field.dim_fiber(),
                         [field, psi](const Point& x) { return field.value(psi.map(x)); })
      .with_fd_step(field.fd_step());
}

Mat pullback_covariant_derivative(const Field& field, const ConnectionForm& gamma, const Chart& psi, const Point& x) {
  return covariant_derivative(field, gamma, psi.map(x)) * psi.jacobian(x);
}

}  // namespace gaugetrace
