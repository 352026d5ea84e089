#include "gaugetrace/field.hpp"

#include "gaugetrace/error.hpp"

namespace gaugetrace {

struct Field::Data {
  int dim_domain = 0;
  int dim_fiber = 0;
  double fd_step = kDefaultStep;
  // analytic
  ValueFn value;
  JacobianFn jacobian;
  SecondFn second;
  // sampled
  bool sampled = false;
  RectilinearGrid grid;
  std::vector<double> values;
};

namespace {

void check_dims(int d, int m) {
  if (d < 1 || d > kMaxDim || m < 1 || m > kMaxDim) {
    fail(ErrorKind::DimensionMismatch, "Field: dimensions must be in 1..4");
  }
}

}  // namespace

Field Field::analytic(int dim_domain, int dim_fiber, ValueFn value, JacobianFn jacobian, SecondFn second) {
  check_dims(dim_domain, dim_fiber);
  if (!value) fail(ErrorKind::InvalidArgument, "Field::analytic requires a value function");
  auto data = std::make_shared<Data>();
  data->dim_domain = dim_domain;
  data->dim_fiber = dim_fiber;
  data->value = std::move(value);
  data->jacobian = std::move(jacobian);
  data->second = std::move(second);
  Field f;
  f.data_ = std::move(data);
  return f;
}

Field Field::sampled(RectilinearGrid grid, int dim_fiber, std::vector<double> values) {
  check_dims(grid.dim(), dim_fiber);
  if (values.size() != grid.node_count() * static_cast<std::size_t>(dim_fiber)) {
    fail(ErrorKind::DimensionMismatch, "Field::sampled: value count does not match grid");
  }
  auto data = std::make_shared<Data>();
  data->dim_domain = grid.dim();
  data->dim_fiber = dim_fiber;
  data->sampled = true;
  data->grid = std::move(grid);
  data->values = std::move(values);
  Field f;
  f.data_ = std::move(data);
  return f;
}

Field Field::zero(int dim_domain, int dim_fiber) {
  return analytic(
      dim_domain, dim_fiber, [dim_fiber](const Point&) { return FiberVec(FiberVec::Zero(dim_fiber)); },
      [dim_domain, dim_fiber](const Point&) { return Mat(Mat::Zero(dim_fiber, dim_domain)); },
      [dim_fiber](const Point&, const Vec&, const Vec&) { return FiberVec(FiberVec::Zero(dim_fiber)); });
}

int Field::dim_domain() const { return data_ ? data_->dim_domain : 0; }
int Field::dim_fiber() const { return data_ ? data_->dim_fiber : 0; }
bool Field::has_analytic_jacobian() const { return data_ && (data_->sampled || bool(data_->jacobian)); }
bool Field::has_analytic_second() const { return data_ && bool(data_->second); }
bool Field::is_sampled() const { return data_ && data_->sampled; }
double Field::fd_step() const { return data_->fd_step; }

const RectilinearGrid& Field::grid() const {
  if (!is_sampled()) fail(ErrorKind::UnsupportedField, "Field::grid on an analytic field");
  return data_->grid;
}

const std::vector<double>& Field::node_values() const {
  if (!is_sampled()) fail(ErrorKind::UnsupportedField, "Field::node_values on an analytic field");
  return data_->values;
}

FiberVec Field::node_value(std::size_t node) const {
  const auto& v = node_values();
  const int m = dim_fiber();
  FiberVec out(m);
  for (int c = 0; c < m; ++c) out(c) = v[node * m + c];
  return out;
}

Field Field::with_fd_step(double step) const {
  if (!(step > 0.0)) fail(ErrorKind::InvalidArgument, "fd step must be positive");
  auto data = std::make_shared<Data>(*data_);
  data->fd_step = step;
  Field f;
  f.data_ = std::move(data);
  return f;
}

FiberVec Field::value(const Point& x) const {
  if (x.size() != dim_domain()) fail(ErrorKind::DimensionMismatch, "Field::value: point dimension");
  if (!data_->sampled) return data_->value(x);
  RectilinearGrid::Stencil st;
  if (!data_->grid.stencil(x, st)) fail(ErrorKind::StencilOutOfRange, "Field::value: point outside sampled grid");
  const int m = dim_fiber();
  FiberVec out = FiberVec::Zero(m);
  for (int c = 0; c < st.count; ++c) {
    for (int k = 0; k < m; ++k) out(k) += st.weights[c] * data_->values[st.nodes[c] * m + k];
  }
  return out;
}

Mat Field::jacobian(const Point& x) const {
  if (x.size() != dim_domain()) fail(ErrorKind::DimensionMismatch, "Field::jacobian: point dimension");
  const int d = dim_domain();
  const int m = dim_fiber();
  if (data_->sampled) {
    RectilinearGrid::Stencil st;
    if (!data_->grid.stencil(x, st)) {
      fail(ErrorKind::StencilOutOfRange, "Field::jacobian: point outside sampled grid");
    }
    Mat out = Mat::Zero(m, d);
    for (int g = 0; g < d; ++g) {
      for (int c = 0; c < st.count; ++c) {
        for (int k = 0; k < m; ++k) out(k, g) += st.gradient_weights[g][c] * data_->values[st.nodes[c] * m + k];
      }
    }
    return out;
  }
  if (data_->jacobian) return data_->jacobian(x);
  Mat out(m, d);
  const auto& f = data_->value;
  for (int g = 0; g < d; ++g) out.col(g) = central_difference4(f, x, unit_vector(d, g), data_->fd_step);
  return out;
}

FiberVec Field::second_derivative(const Point& x, const Vec& v, const Vec& w) const {
  if (data_->second) return data_->second(x, v, w);
  if (data_->sampled) {
    fail(ErrorKind::UnsupportedField, "second derivatives of sampled fields are not defined");
  }
  // D(DU[w])[v]
  auto directional = [this, &w](const Point& p) { return FiberVec(jacobian(p) * w); };
  return central_difference4(directional, x, v, data_->fd_step);
}

Field Field::combine(double a, const Field& other, double b) const {
  if (dim_domain() != other.dim_domain() || dim_fiber() != other.dim_fiber()) {
    fail(ErrorKind::DimensionMismatch, "Field::combine: dimensions differ");
  }
  if (is_sampled() && other.is_sampled()) {
    const auto& g1 = grid();
    const auto& g2 = other.grid();
    bool same = g1.dim() == g2.dim();
    for (int k = 0; same && k < g1.dim(); ++k) same = g1.axis(k) == g2.axis(k);
    if (!same) fail(ErrorKind::DimensionMismatch, "Field::combine: sampled grids differ");
    std::vector<double> v(node_values().size());
    const auto& v1 = node_values();
    const auto& v2 = other.node_values();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a * v1[i] + b * v2[i];
    return sampled(g1, dim_fiber(), std::move(v));
  }
  const Field lhs = *this;
  const Field rhs = other;
  ValueFn value = [lhs, rhs, a, b](const Point& x) { return FiberVec(a * lhs.value(x) + b * rhs.value(x)); };
  JacobianFn jac;
  if (lhs.has_analytic_jacobian() && rhs.has_analytic_jacobian()) {
    jac = [lhs, rhs, a, b](const Point& x) { return Mat(a * lhs.jacobian(x) + b * rhs.jacobian(x)); };
  }
  SecondFn second;
  if (lhs.has_analytic_second() && rhs.has_analytic_second()) {
    second = [lhs, rhs, a, b](const Point& x, const Vec& v, const Vec& w) {
      return FiberVec(a * lhs.second_derivative(x, v, w) + b * rhs.second_derivative(x, v, w));
    };
  }
  return analytic(dim_domain(), dim_fiber(), std::move(value), std::move(jac), std::move(second))
      .with_fd_step(fd_step());
}

Field Field::scaled(double a) const {
  if (is_sampled()) {
    std::vector<double> v = node_values();
    for (double& x : v) x *= a;
    return sampled(grid(), dim_fiber(), std::move(v));
  }
  return combine(a, Field::zero(dim_domain(), dim_fiber()), 0.0);
}

void require_compact_support(const Field& field, SupportLayout layout) {
  if (!field.is_sampled()) return;
  const auto& grid = field.grid();
  const int d = grid.dim();
  const int m = field.dim_fiber();
  const auto& values = field.node_values();
  const int lateral_axes = layout == SupportLayout::HalfSpace ? d - 1 : d;
  for (std::size_t node = 0; node < grid.node_count(); ++node) {
    const auto idx = grid.multi_index(node);
    bool collar = false;
    for (int k = 0; k < lateral_axes; ++k) {
      const int last = grid.nodes_along(k) - 1;
      if (idx[k] <= 1 || idx[k] >= last - 1) collar = true;
    }
    if (layout == SupportLayout::HalfSpace && idx[d - 1] == grid.nodes_along(d - 1) - 1) collar = true;
    if (!collar) continue;
    for (int c = 0; c < m; ++c) {
      if (values[node * m + c] != 0.0) {
        fail(ErrorKind::UnsupportedField, "sampled field does not vanish on its support collar");
      }
    }
  }
}

Field sample_on(const Field& field, const RectilinearGrid& grid) {
  if (field.dim_domain() != grid.dim()) fail(ErrorKind::DimensionMismatch, "sample_on: grid dimension");
  const int m = field.dim_fiber();
  std::vector<double> values(grid.node_count() * m);
  for (std::size_t node = 0; node < grid.node_count(); ++node) {
    const FiberVec v = field.value(grid.node(node));
    for (int c = 0; c < m; ++c) values[node * m + c] = v(c);
  }
  return Field::sampled(grid, m, std::move(values));
}

}  // namespace gaugetrace
