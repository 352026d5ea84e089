#include "gaugetrace/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gaugetrace/error.hpp"

namespace gaugetrace {

Box Box::unbounded(int dim) {
  const double inf = std::numeric_limits<double>::infinity();
  return Box{Point::Constant(dim, -inf), Point::Constant(dim, inf)};
}

Box Box::cube(int dim, double half_width) {
  return Box{Point::Constant(dim, -half_width), Point::Constant(dim, half_width)};
}

bool Box::bounded() const { return lo.allFinite() && hi.allFinite(); }

bool Box::contains(const Point& x, double slack) const {
  if (x.size() != lo.size()) return false;
  for (int k = 0; k < x.size(); ++k) {
    if (!(x(k) >= lo(k) - slack && x(k) <= hi(k) + slack)) return false;
  }
  return true;
}

double Box::diameter() const {
  if (!bounded()) return std::numeric_limits<double>::infinity();
  return (hi - lo).norm();
}

Point Box::center() const {
  Point c(lo.size());
  for (int k = 0; k < lo.size(); ++k) {
    c(k) = (std::isfinite(lo(k)) && std::isfinite(hi(k))) ? 0.5 * (lo(k) + hi(k)) : 0.0;
  }
  return c;
}

void QuadratureSpec::validate() const {
  if (lateral_cells < 8 || vertical_cells < 8) {
    fail(ErrorKind::InvalidArgument, "QuadratureSpec: N_lat and N_vert must be >= 8");
  }
  if (exclusion_radius < 1) fail(ErrorKind::InvalidArgument, "QuadratureSpec: r_excl must be >= 1");
  if (!(grading >= 1.0)) fail(ErrorKind::InvalidArgument, "QuadratureSpec: grading must be >= 1");
  if (!(lateral_half_width > 0.0) || !(height > 0.0)) {
    fail(ErrorKind::InvalidArgument, "QuadratureSpec: extents must be positive");
  }
}

RectilinearGrid::RectilinearGrid(std::vector<std::vector<double>> axes) : axes_(std::move(axes)) {
  if (axes_.empty() || static_cast<int>(axes_.size()) > kMaxDim) {
    fail(ErrorKind::DimensionMismatch, "RectilinearGrid: dimension must be in 1..4");
  }
  std::size_t stride = 1;
  for (int k = dim() - 1; k >= 0; --k) {
    const auto& a = axes_[k];
    if (a.size() < 2) fail(ErrorKind::InvalidArgument, "RectilinearGrid: axis needs >= 2 nodes");
    if (!std::is_sorted(a.begin(), a.end()) || std::adjacent_find(a.begin(), a.end()) != a.end()) {
      fail(ErrorKind::InvalidArgument, "RectilinearGrid: axis nodes must be strictly increasing");
    }
    strides_[k] = stride;
    stride *= a.size();
  }
  node_count_ = stride;
}

std::size_t RectilinearGrid::cell_count() const {
  std::size_t c = 1;
  for (const auto& a : axes_) c *= a.size() - 1;
  return c;
}

std::size_t RectilinearGrid::flat_index(const std::array<int, kMaxDim>& idx) const {
  std::size_t flat = 0;
  for (int k = 0; k < dim(); ++k) flat += static_cast<std::size_t>(idx[k]) * strides_[k];
  return flat;
}

std::array<int, kMaxDim> RectilinearGrid::multi_index(std::size_t flat) const {
  std::array<int, kMaxDim> idx{};
  for (int k = 0; k < dim(); ++k) {
    idx[k] = static_cast<int>(flat / strides_[k]);
    flat %= strides_[k];
  }
  return idx;
}

Point RectilinearGrid::node(std::size_t flat) const {
  const auto idx = multi_index(flat);
  Point x(dim());
  for (int k = 0; k < dim(); ++k) x(k) = axes_[k][idx[k]];
  return x;
}

Box RectilinearGrid::box() const {
  Box b{Point(dim()), Point(dim())};
  for (int k = 0; k < dim(); ++k) {
    b.lo(k) = axes_[k].front();
    b.hi(k) = axes_[k].back();
  }
  return b;
}

bool RectilinearGrid::stencil(const Point& x, Stencil& out) const {
  if (x.size() != dim()) return false;
  std::array<int, kMaxDim> cell{};
  std::array<double, kMaxDim> frac{};
  std::array<double, kMaxDim> width{};
  for (int k = 0; k < dim(); ++k) {
    const auto& a = axes_[k];
    const double tol = 1e-12 * (a.back() - a.front());
    if (!(x(k) >= a.front() - tol && x(k) <= a.back() + tol)) return false;
    auto it = std::upper_bound(a.begin(), a.end(), x(k));
    int i = static_cast<int>(it - a.begin()) - 1;
    i = std::clamp(i, 0, static_cast<int>(a.size()) - 2);
    cell[k] = i;
    width[k] = a[i + 1] - a[i];
    frac[k] = std::clamp((x(k) - a[i]) / width[k], 0.0, 1.0);
  }
  const int corners = 1 << dim();
  out.count = corners;
  for (int c = 0; c < corners; ++c) {
    std::array<int, kMaxDim> idx{};
    double w = 1.0;
    std::array<double, kMaxDim> factor{};
    for (int k = 0; k < dim(); ++k) {
      const int bit = (c >> k) & 1;
      idx[k] = cell[k] + bit;
      factor[k] = bit ? frac[k] : 1.0 - frac[k];
      w *= factor[k];
    }
    out.nodes[c] = flat_index(idx);
    out.weights[c] = w;
    for (int g = 0; g < dim(); ++g) {
      double gw = (((c >> g) & 1) ? 1.0 : -1.0) / width[g];
      for (int k = 0; k < dim(); ++k) {
        if (k != g) gw *= factor[k];
      }
      out.gradient_weights[g][c] = gw;
    }
  }
  return true;
}

std::vector<double> graded_nodes(double height, int cells, double grading) {
  std::vector<double> z(cells + 1);
  for (int j = 0; j <= cells; ++j) {
    z[j] = height * std::pow(static_cast<double>(j) / cells, grading);
  }
  z.back() = height;
  return z;
}

namespace {
std::vector<double> uniform_nodes(double half_width, int cells) {
  std::vector<double> x(cells + 1);
  const double h = 2.0 * half_width / cells;
  for (int i = 0; i <= cells; ++i) x[i] = -half_width + h * i;
  x.back() = half_width;
  return x;
}
}  // namespace

RectilinearGrid make_half_space_grid(int n, const QuadratureSpec& q) {
  q.validate();
  std::vector<std::vector<double>> axes;
  for (int k = 0; k < n; ++k) axes.push_back(uniform_nodes(q.lateral_half_width, q.lateral_cells));
  axes.push_back(graded_nodes(q.height, q.vertical_cells, q.grading));
  return RectilinearGrid(std::move(axes));
}

RectilinearGrid make_boundary_grid(int n, const QuadratureSpec& q) {
  q.validate();
  std::vector<std::vector<double>> axes;
  for (int k = 0; k < n; ++k) axes.push_back(uniform_nodes(q.lateral_half_width, q.lateral_cells));
  return RectilinearGrid(std::move(axes));
}

}  // namespace gaugetrace
