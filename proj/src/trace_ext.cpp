#include "gaugetrace/trace_ext.hpp"

#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "gaugetrace/error.hpp"
#include "gaugetrace/parallel.hpp"
#include "gaugetrace/transport.hpp"

namespace gaugetrace {

namespace {

double bump(double r2) { return r2 < 1.0 ? std::exp(-1.0 / (1.0 - r2)) : 0.0; }

}  // namespace

Mollifier::Mollifier(int n) : n_(n) {
  if (n < 1 || n > kMaxDim) fail(ErrorKind::DimensionMismatch, "mollifier dimension must be in 1..4");
  // int_B bump = |S^{n-1}| int_0^1 r^{n-1} bump(r^2) dr
  auto radial = [n](double r) { return std::pow(r, n - 1) * bump(r * r); };
  const double integral = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(radial, 0.0, 1.0, 15, 1e-14);
  const double sphere = 2.0 * std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n);
  c_n_ = 1.0 / (sphere * integral);
}

double Mollifier::operator()(const Point& y) const { return c_n_ * bump(y.squaredNorm()); }

double Mollifier::scaled(const Point& y, double t) const { return (*this)(Point(y / t)) / std::pow(t, n_); }

double auto_beta(const ConnectionForm& gamma, const Box& region, int samples, double local_radius) {
  double budget = curvature_sup_norm(gamma, region, samples);
  if (local_radius > 0.0) budget += 1.0 / (local_radius * local_radius);
  return 1.05 * budget;
}

Field trace(const Field& field) {
  const int d = field.dim_domain();
  const int n = d - 1;
  if (n < 1) fail(ErrorKind::DimensionMismatch, "trace needs a half-space field");
  const int m = field.dim_fiber();
  if (field.is_sampled()) {
    const auto& grid = field.grid();
    if (grid.axis(d - 1).front() != 0.0) fail(ErrorKind::OutOfDomain, "sampled field does not reach z = 0");
    std::vector<std::vector<double>> axes;
    for (int k = 0; k < n; ++k) axes.push_back(grid.axis(k));
    RectilinearGrid boundary(axes);
    std::vector<double> values(boundary.node_count() * m);
    for (std::size_t b = 0; b < boundary.node_count(); ++b) {
      auto idx = boundary.multi_index(b);
      idx[n] = 0;
      const std::size_t node = grid.flat_index(idx);
      for (int c = 0; c < m; ++c) values[b * m + c] = field.node_values()[node * m + c];
    }
    return Field::sampled(std::move(boundary), m, std::move(values));
  }
  auto lift = [n](const Point& x) {
    Point z = Point::Zero(n + 1);
    z.head(n) = x;
    return z;
  };
  Field::JacobianFn jac;
  if (field.has_analytic_jacobian()) {
    jac = [field, lift, n](const Point& x) { return Mat(field.jacobian(lift(x)).leftCols(n)); };
  }
  return Field::analytic(
             n, m, [field, lift](const Point& x) { return field.value(lift(x)); }, std::move(jac))
      .with_fd_step(field.fd_step());
}

Field extend(const Field& boundary_field, const ConnectionForm& gamma, const ExtensionConfig& cfg) {
  const int n = boundary_field.dim_domain();
  const int d = n + 1;
  const int m = boundary_field.dim_fiber();
  if (gamma.dim_domain() != d || gamma.dim_fiber() != m) {
    fail(ErrorKind::DimensionMismatch, "extend: boundary field and connection dimensions differ");
  }
  if (!(cfg.beta >= 0.0)) fail(ErrorKind::InadmissibleBeta, "beta must be nonnegative");
  if (cfg.steps < 8) fail(ErrorKind::InvalidArgument, "extend needs at least 8 transport steps");
  const QuadratureSpec& q = cfg.grid;
  const RectilinearGrid grid = make_half_space_grid(n, q);

  double required = curvature_sup_norm(gamma, grid.box(), cfg.curvature_samples);
  if (cfg.local_radius > 0.0) required += 1.0 / (cfg.local_radius * cfg.local_radius);
  if (cfg.beta < required) {
    fail(ErrorKind::InadmissibleBeta, "beta " + std::to_string(cfg.beta) + " is below the curvature budget " +
                                          std::to_string(required));
  }

  const RectilinearGrid lateral = make_boundary_grid(n, q);
  const std::size_t lateral_count = lateral.node_count();
  std::vector<FiberVec> u(lateral_count);
  for (std::size_t a = 0; a < lateral_count; ++a) u[a] = boundary_field.value(lateral.node(a));

  // The mollified values reach a distance of min(H, damping radius) from supp u.
  const double damping_radius = cfg.beta > 0.0 ? std::sqrt(std::log(1e6) / cfg.beta) : q.height;
  const double reach = std::min(q.height, damping_radius);
  for (std::size_t a = 0; a < lateral_count; ++a) {
    if (u[a].norm() == 0.0) continue;
    const Point x = lateral.node(a);
    if (x.cwiseAbs().maxCoeff() + reach > q.lateral_half_width + 1e-12) {
      fail(ErrorKind::OutOfDomain, "support of u is too close to the lateral box edge for the extension height");
    }
  }

  const ConnectionForm boundary_connection = restrict_to_boundary(gamma);
  std::vector<Point> lateral_points(lateral_count);
  for (std::size_t a = 0; a < lateral_count; ++a) lateral_points[a] = lateral.node(a);
  const BoundaryTransportTable table(boundary_connection, lateral_points, cfg.steps, q.height);

  const Mollifier phi(n);
  const double h = q.lateral_cell();
  const std::vector<double>& heights = grid.axis(n);
  const int nodes_per_axis = q.lateral_cells + 1;

  // Lattice offsets inside the ball of radius t and the discrete weight sum
  // over the whole lattice, so the weights always add up to one.
  struct Offset {
    std::array<int, kMaxDim> k;
    double weight;
  };
  std::vector<std::vector<Offset>> offsets(heights.size());
  for (std::size_t j = 1; j < heights.size(); ++j) {
    const double t = heights[j];
    const int reach_cells = static_cast<int>(std::ceil(t / h));
    std::array<int, kMaxDim> k{};
    for (int c = 0; c < n; ++c) k[c] = -reach_cells;
    double total = 0.0;
    while (true) {
      Point y(n);
      for (int c = 0; c < n; ++c) y(c) = k[c] * h;
      const double w = phi.scaled(y, t);
      if (w > 0.0) {
        offsets[j].push_back({k, w});
        total += w;
      }
      int c = 0;
      while (c < n && ++k[c] > reach_cells) k[c++] = -reach_cells;
      if (c == n) break;
    }
    for (auto& o : offsets[j]) o.weight /= total;
  }

  std::vector<double> values(grid.node_count() * m, 0.0);
  parallel_for(grid.node_count(), [&](std::size_t node) {
    const auto idx = grid.multi_index(node);
    std::array<int, kMaxDim> lat{};
    for (int c = 0; c < n; ++c) lat[c] = idx[c];
    const std::size_t a = lateral.flat_index(lat);
    FiberVec out;
    if (idx[n] == 0) {
      out = u[a];
    } else {
      const double t = heights[idx[n]];
      FiberVec v = FiberVec::Zero(m);
      for (const auto& o : offsets[idx[n]]) {
        std::array<int, kMaxDim> b_idx{};
        bool inside = true;
        for (int c = 0; c < n; ++c) {
          b_idx[c] = lat[c] + o.k[c];
          inside = inside && b_idx[c] >= 0 && b_idx[c] < nodes_per_axis;
        }
        if (!inside) continue;  // zero padding beyond the lateral box
        const std::size_t b = lateral.flat_index(b_idx);
        if (u[b].norm() == 0.0) continue;
        v += o.weight * (table.transport(a, b) * u[b]);
      }
      if (v.norm() == 0.0) {
        out = v;
      } else {
        const Point z = grid.node(node);
        Point foot = z;
        foot(n) = 0.0;
        const Mat up = transport_segment(gamma, z, foot, cfg.steps).matrix();
        out = std::exp(-cfg.beta * t * t) * (up * v);
      }
    }
    for (int c = 0; c < m; ++c) values[node * m + c] = out(c);
  });
  return Field::sampled(grid, m, std::move(values));
}

double first_layer_attainment(const Field& extended, const Field& boundary_field) {
  if (!extended.is_sampled()) fail(ErrorKind::UnsupportedField, "attainment needs a sampled extension");
  const auto& grid = extended.grid();
  const int n = grid.dim() - 1;
  double worst = 0.0;
  for (std::size_t node = 0; node < grid.node_count(); ++node) {
    const auto idx = grid.multi_index(node);
    if (idx[n] != 1) continue;
    Point x = grid.node(node).head(n);
    worst = std::max(worst, (extended.node_value(node) - boundary_field.value(x)).norm());
  }
  return worst;
}

InequalityReport make_report(std::string name, double lhs, double rhs, int grid, int steps) {
  InequalityReport r;
  r.name = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  if (rhs > 0.0) {
    r.ratio = lhs / rhs;
  } else {
    r.ratio = lhs == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  r.grid = grid;
  r.steps = steps;
  return r;
}

std::pair<InequalityReport, InequalityReport> trace_inequality_report(const Field& field, const ConnectionForm& gamma,
                                                                      double s, double p, double beta,
                                                                      const QuadratureSpec& q, int steps) {
  const int n = field.dim_domain() - 1;
  const GagliardoParams params(n, s, p);
  const double required = curvature_sup_norm(gamma, make_half_space_grid(n, q).box(), 64);
  if (beta < required) fail(ErrorKind::InadmissibleBeta, "beta is below the measured curvature sup");
  const Field boundary = trace(field);
  const SeminormResult semi = gagliardo_seminorm(boundary, restrict_to_boundary(gamma), params, q, steps);
  const WeightedEnergy bulk = weighted_w1p_energy(field, gamma, p, params.weight_exponent(), q);
  const double lp = boundary_lp_power(boundary, p, q);
  return {
      make_report("trace-seminorm", semi.power, bulk.grad_term + std::pow(beta, p / 2.0) * bulk.mass_term,
                  q.lateral_cells, steps),
      make_report("trace-lp", lp, std::pow(bulk.grad_term, 1.0 - s) * std::pow(bulk.mass_term, s), q.lateral_cells,
                  steps)};
}

std::pair<InequalityReport, InequalityReport> extension_inequality_report(const Field& boundary_field,
                                                                          const ConnectionForm& gamma, double s,
                                                                          double p, double beta,
                                                                          const QuadratureSpec& q, int steps) {
  const int n = boundary_field.dim_domain();
  const GagliardoParams params(n, s, p);
  ExtensionConfig cfg;
  cfg.beta = beta;
  cfg.s = s;
  cfg.p = p;
  cfg.grid = q;
  cfg.steps = steps;
  const Field extended = extend(boundary_field, gamma, cfg);
  const WeightedEnergy bulk = weighted_w1p_energy(extended, gamma, p, params.weight_exponent(), q);
  const SeminormResult semi = gagliardo_seminorm(boundary_field, restrict_to_boundary(gamma), params, q, steps);
  const double lp = boundary_lp_power(boundary_field, p, q);
  const double mass_rhs =
      beta > 0.0 ? lp / std::pow(beta, (1.0 - s) * p / 2.0) : std::numeric_limits<double>::infinity();
  return {make_report("extension-gradient", bulk.grad_term, semi.power + std::pow(beta, s * p / 2.0) * lp,
                      q.lateral_cells, steps),
          make_report("extension-mass", bulk.mass_term, mass_rhs, q.lateral_cells, steps)};
}

}  // namespace gaugetrace
