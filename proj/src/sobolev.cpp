#include "gaugetrace/sobolev.hpp"

#include <cmath>
#include <random>

#include "gaugetrace/error.hpp"
#include "gaugetrace/parallel.hpp"
#include "gaugetrace/transport.hpp"

namespace gaugetrace {

void require_admissible_weight(double p, double alpha) {
  if (!(p >= 1.0) || !std::isfinite(p)) fail(ErrorKind::WeightOutOfRange, "p must be a finite value >= 1");
  if (!(alpha > -1.0 && alpha < p - 1.0)) {
    fail(ErrorKind::WeightOutOfRange, "weight exponent must satisfy -1 < alpha < p - 1");
  }
}

GagliardoParams::GagliardoParams(int n, double s, double p) : n_(n), s_(s), p_(p) {
  if (n < 1 || n > kMaxDim - 1) fail(ErrorKind::DimensionMismatch, "boundary dimension must be in 1..3");
  if (!(s > 0.0 && s < 1.0)) fail(ErrorKind::WeightOutOfRange, "s must lie in (0, 1)");
  require_admissible_weight(p, weight_exponent());
}

namespace {

struct CellAxis {
  std::vector<double> centre;
  std::vector<double> width;
};

CellAxis cells_of(const std::vector<double>& nodes) {
  CellAxis a;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    a.centre.push_back(0.5 * (nodes[i] + nodes[i + 1]));
    a.width.push_back(nodes[i + 1] - nodes[i]);
  }
  return a;
}

double sphere_area(int n) {
  // |S^{n-1}| = 2 pi^{n/2} / Gamma(n/2)
  return 2.0 * std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n);
}

}  // namespace

WeightedEnergy weighted_w1p_energy(const Field& field, const ConnectionForm& gamma, double p, double alpha,
                                   const QuadratureSpec& q) {
  require_admissible_weight(p, alpha);
  const int d = field.dim_domain();
  if (gamma.dim_domain() != d || gamma.dim_fiber() != field.dim_fiber()) {
    fail(ErrorKind::DimensionMismatch, "weighted energy: field and connection dimensions differ");
  }
  const RectilinearGrid grid = make_half_space_grid(d - 1, q);
  std::vector<CellAxis> axes;
  for (int k = 0; k < d; ++k) axes.push_back(cells_of(grid.axis(k)));
  std::array<std::size_t, kMaxDim> counts{};
  std::size_t total = 1;
  for (int k = 0; k < d; ++k) {
    counts[k] = axes[k].centre.size();
    total *= counts[k];
  }
  auto cell = [&](std::size_t flat, Point& x, double& volume) {
    volume = 1.0;
    x.resize(d);
    for (int k = d - 1; k >= 0; --k) {
      const std::size_t i = flat % counts[k];
      flat /= counts[k];
      x(k) = axes[k].centre[i];
      volume *= axes[k].width[i];
    }
  };
  WeightedEnergy out;
  out.grad_term = parallel_sum(total, [&](std::size_t c) {
    Point x;
    double vol = 0.0;
    cell(c, x, vol);
    const double norm = covariant_derivative(field, gamma, x).norm();
    return norm == 0.0 ? 0.0 : std::pow(norm, p) * std::pow(x(d - 1), alpha) * vol;
  });
  out.mass_term = parallel_sum(total, [&](std::size_t c) {
    Point x;
    double vol = 0.0;
    cell(c, x, vol);
    const double norm = field.value(x).norm();
    return norm == 0.0 ? 0.0 : std::pow(norm, p) * std::pow(x(d - 1), alpha) * vol;
  });
  return out;
}

std::vector<Point> boundary_cell_centres(int n, const QuadratureSpec& q) {
  q.validate();
  const int cells = q.lateral_cells;
  const double h = q.lateral_cell();
  std::size_t total = 1;
  for (int k = 0; k < n; ++k) total *= cells;
  std::vector<Point> out;
  out.reserve(total);
  for (std::size_t flat = 0; flat < total; ++flat) {
    Point x(n);
    std::size_t rest = flat;
    for (int k = n - 1; k >= 0; --k) {
      x(k) = -q.lateral_half_width + (static_cast<double>(rest % cells) + 0.5) * h;
      rest /= cells;
    }
    out.push_back(x);
  }
  return out;
}

// ------------------------------------------------------------ transport table

BoundaryTransportTable::BoundaryTransportTable(const ConnectionForm& boundary_connection, std::vector<Point> points,
                                               int steps, double max_distance)
    : points_(std::move(points)), m_(boundary_connection.dim_fiber()), max_distance_(max_distance) {
  const std::size_t count = points_.size();
  const std::size_t block = static_cast<std::size_t>(m_) * m_;
  data_.assign(count * count * block, 0.0);
  present_.assign(count * count, 0);
  parallel_for(count, [&](std::size_t i) {
    for (std::size_t j = i + 1; j < count; ++j) {
      if ((points_[i] - points_[j]).norm() > max_distance_) continue;
      const Mat r = transport_segment(boundary_connection, points_[i], points_[j], steps).matrix();
      double* out = data_.data() + slot(i, j) * block;
      for (int a = 0; a < m_; ++a) {
        for (int b = 0; b < m_; ++b) out[a * m_ + b] = r(a, b);
      }
      present_[slot(i, j)] = 1;
    }
  });
}

std::size_t BoundaryTransportTable::slot(std::size_t i, std::size_t j) const { return i * points_.size() + j; }

bool BoundaryTransportTable::has(std::size_t i, std::size_t j) const {
  if (i == j) return true;
  return i < j ? present_[slot(i, j)] != 0 : present_[slot(j, i)] != 0;
}

Mat BoundaryTransportTable::transport(std::size_t i, std::size_t j) const {
  if (i == j) return Mat::Identity(m_, m_);
  if (!has(i, j)) fail(ErrorKind::OutOfDomain, "transport pair was not tabulated");
  const bool flip = i > j;
  const double* in = data_.data() + (flip ? slot(j, i) : slot(i, j)) * static_cast<std::size_t>(m_) * m_;
  Mat r(m_, m_);
  for (int a = 0; a < m_; ++a) {
    for (int b = 0; b < m_; ++b) r(a, b) = in[a * m_ + b];
  }
  return flip ? Mat(r.transpose()) : r;
}

// ------------------------------------------------------------------ seminorm

SeminormResult gagliardo_seminorm(const Field& boundary_field, const ConnectionForm& boundary_connection,
                                  const GagliardoParams& params, const QuadratureSpec& q, int steps) {
  if (boundary_connection.dim_domain() != params.n()) {
    fail(ErrorKind::DimensionMismatch, "seminorm: connection is not a boundary connection");
  }
  BoundaryTransportTable table(boundary_connection, boundary_cell_centres(params.n(), q), steps);
  SeminormResult r = gagliardo_seminorm(boundary_field, table, params, q);
  r.steps = steps;
  return r;
}

SeminormResult gagliardo_seminorm(const Field& boundary_field, const BoundaryTransportTable& table,
                                  const GagliardoParams& params, const QuadratureSpec& q) {
  const int n = params.n();
  if (boundary_field.dim_domain() != n || boundary_field.dim_fiber() != table.fiber_dim()) {
    fail(ErrorKind::DimensionMismatch, "seminorm: field and table dimensions differ");
  }
  require_compact_support(boundary_field, SupportLayout::Boundary);
  const std::size_t count = table.size();
  const double h = q.lateral_cell();
  const double cutoff = q.exclusion_radius * h * (1.0 - 1e-9);
  const double near = std::max(1, q.exclusion_radius) * h * (1.0 + 1e-9);
  const double p = params.p();
  const double kernel = params.kernel_exponent();
  const double cell_volume = std::pow(h, n);

  std::vector<FiberVec> values(count);
  for (std::size_t i = 0; i < count; ++i) values[i] = boundary_field.value(table.point(i));

  SeminormResult out;
  out.grid = q.lateral_cells;
  out.exclusion_radius = q.exclusion_radius;
  const double row_sum = parallel_sum(count, [&](std::size_t i) {
    double acc = 0.0;
    for (std::size_t j = i + 1; j < count; ++j) {
      const double dist = (table.point(i) - table.point(j)).norm();
      if (dist < cutoff) continue;
      const double diff = (values[i] - table.transport(i, j) * values[j]).norm();
      if (diff == 0.0) continue;
      acc += std::pow(diff, p) / std::pow(dist, kernel);
    }
    return acc;
  });
  out.power = 2.0 * row_sum * cell_volume * cell_volume;
  out.value = std::pow(out.power, 1.0 / p);
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = i + 1; j < count; ++j) {
      if ((table.point(i) - table.point(j)).norm() >= cutoff) ++pairs;
    }
  }
  out.pairs = pairs;

  // Excluded shell: |u(x) - R u(y)| <= M(x)|x - y| near the diagonal, so the
  // missing mass per x is M^p |S^{n-1}| (r h)^{(1-s)p} / ((1-s)p).
  const double order = (1.0 - params.s()) * p;
  const double shell = sphere_area(n) * std::pow(q.exclusion_radius * h, order) / order;
  out.residual_bound = parallel_sum(count, [&](std::size_t i) {
    double lipschitz = 0.0;
    for (std::size_t j = 0; j < count; ++j) {
      if (j == i) continue;
      const double dist = (table.point(i) - table.point(j)).norm();
      if (dist > near) continue;
      lipschitz = std::max(lipschitz, (values[i] - table.transport(i, j) * values[j]).norm() / dist);
    }
    return cell_volume * std::pow(lipschitz, p) * shell;
  });
  return out;
}

double boundary_lp_power(const Field& boundary_field, double p, const QuadratureSpec& q) {
  const int n = boundary_field.dim_domain();
  const auto centres = boundary_cell_centres(n, q);
  const double volume = std::pow(q.lateral_cell(), n);
  return parallel_sum(centres.size(), [&](std::size_t i) {
    const double v = boundary_field.value(centres[i]).norm();
    return v == 0.0 ? 0.0 : std::pow(v, p) * volume;
  });
}

// --------------------------------------------------------------- diamagnetic

namespace {

constexpr double kNormFloor = 1e-8;

double directional_defect(const Field& field, const ConnectionForm& gamma, const Point& x, const Vec& v, double h) {
  if (field.value(x).norm() <= kNormFloor) return -std::numeric_limits<double>::infinity();
  auto norm_of = [&field](const Point& p) {
    Vec out(1);
    out(0) = field.value(p).norm();
    return out;
  };
  const double d_norm = std::abs(central_difference4(norm_of, x, v, h)(0));
  const double cov = (covariant_derivative(field, gamma, x) * v).norm();
  return d_norm - cov;
}

}  // namespace

double diamagnetic_defect(const Field& field, const ConnectionForm& gamma, const QuadratureSpec& q) {
  const int d = field.dim_domain();
  const RectilinearGrid grid = make_half_space_grid(d - 1, q);
  std::vector<CellAxis> axes;
  for (int k = 0; k < d; ++k) axes.push_back(cells_of(grid.axis(k)));
  std::array<std::size_t, kMaxDim> counts{};
  std::size_t total = 1;
  for (int k = 0; k < d; ++k) {
    counts[k] = axes[k].centre.size();
    total *= counts[k];
  }
  return parallel_max(total, [&](std::size_t c) {
    Point x(d);
    double min_width = std::numeric_limits<double>::infinity();
    std::size_t rest = c;
    for (int k = d - 1; k >= 0; --k) {
      const std::size_t i = rest % counts[k];
      rest /= counts[k];
      x(k) = axes[k].centre[i];
      min_width = std::min(min_width, axes[k].width[i]);
    }
    // Sampled fields are differenced inside their cell, where they are smooth.
    const double h = field.is_sampled() ? 0.05 * min_width : std::min(field.fd_step(), 0.05 * min_width);
    double worst = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < d; ++k) worst = std::max(worst, directional_defect(field, gamma, x, unit_vector(d, k), h));
    return worst;
  });
}

double diamagnetic_defect(const Field& field, const ConnectionForm& gamma, const Box& region, int count,
                          std::uint64_t seed) {
  if (!region.bounded()) fail(ErrorKind::InvalidArgument, "diamagnetic sweep needs a bounded region");
  const int d = field.dim_domain();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal;
  std::vector<Point> points(count);
  std::vector<Vec> dirs(count);
  for (int i = 0; i < count; ++i) {
    Point x(d);
    for (int k = 0; k < d; ++k) x(k) = region.lo(k) + unit(rng) * (region.hi(k) - region.lo(k));
    Vec v(d);
    for (int k = 0; k < d; ++k) v(k) = normal(rng);
    points[i] = x;
    dirs[i] = v.normalized();
  }
  return parallel_max(static_cast<std::size_t>(count), [&](std::size_t i) {
    return directional_defect(field, gamma, points[i], dirs[i], field.fd_step());
  });
}

}  // namespace gaugetrace
