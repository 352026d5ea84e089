#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "gaugetrace/connection.hpp"
#include "gaugetrace/field.hpp"
#include "gaugetrace/grid.hpp"

namespace gaugetrace {

/// Smoothness s in (0, 1) and integrability p >= 1 on R^n.
class GagliardoParams {
 public:
  /// Throws WeightOutOfRange unless 0 < s < 1, p >= 1 and -1 < alpha < p - 1.
  GagliardoParams(int n, double s, double p);

  int n() const { return n_; }
  double s() const { return s_; }
  double p() const { return p_; }
  /// alpha = (1 - s) p - 1, the exponent of the vertical weight.
  double weight_exponent() const { return (1.0 - s_) * p_ - 1.0; }
  /// n + s p.
  double kernel_exponent() const { return n_ + s_ * p_; }

 private:
  int n_;
  double s_;
  double p_;
};

/// Throws WeightOutOfRange unless -1 < alpha < p - 1 and p >= 1.
void require_admissible_weight(double p, double alpha);

struct WeightedEnergy {
  double grad_term = 0.0;  // int |D_G U|^p z^alpha
  double mass_term = 0.0;  // int |U|^p z^alpha
};

/// Midpoint rule at the cell centres of the graded half-space mesh.
/// |D_G U| is the Frobenius norm of the m x d covariant Jacobian.
WeightedEnergy weighted_w1p_energy(const Field& field, const ConnectionForm& gamma, double p, double alpha,
                                   const QuadratureSpec& q);

/// Lateral cell centres of [-L, L]^n, row-major.
std::vector<Point> boundary_cell_centres(int n, const QuadratureSpec& q);

/// Segment transports R(x_i, x_j) between a fixed list of boundary points.
/// Pairs further apart than `max_distance` are not stored.
class BoundaryTransportTable {
 public:
  BoundaryTransportTable(const ConnectionForm& boundary_connection, std::vector<Point> points, int steps,
                         double max_distance = std::numeric_limits<double>::infinity());

  std::size_t size() const { return points_.size(); }
  const Point& point(std::size_t i) const { return points_[i]; }
  int fiber_dim() const { return m_; }
  /// R(x_i, x_j); R(x_j, x_i) is its transpose. Throws OutOfDomain for pairs
  /// that were not tabulated.
  Mat transport(std::size_t i, std::size_t j) const;
  bool has(std::size_t i, std::size_t j) const;

 private:
  std::size_t slot(std::size_t i, std::size_t j) const;

  std::vector<Point> points_;
  int m_ = 0;
  double max_distance_;
  std::vector<double> data_;   // m*m entries per ordered slot i < j
  std::vector<char> present_;
};

struct SeminormResult {
  double power = 0.0;           // |u|^p
  double value = 0.0;           // |u|
  double residual_bound = 0.0;  // estimate of the excluded near-diagonal mass (p-th power)
  std::size_t pairs = 0;
  int grid = 0;
  int exclusion_radius = 0;
  int steps = 0;
};

/// Gauge-covariant Gagliardo seminorm by a midpoint double sum over lateral
/// cell-centre pairs at distance >= r_excl * cell.
SeminormResult gagliardo_seminorm(const Field& boundary_field, const ConnectionForm& boundary_connection,
                                  const GagliardoParams& params, const QuadratureSpec& q, int steps);

/// Same sum over a precomputed table of transports between the cell centres.
SeminormResult gagliardo_seminorm(const Field& boundary_field, const BoundaryTransportTable& table,
                                  const GagliardoParams& params, const QuadratureSpec& q);

/// int |u|^p dx on [-L, L]^n by the midpoint rule.
double boundary_lp_power(const Field& boundary_field, double p, const QuadratureSpec& q);

/// max over cell centres and coordinate directions of
/// |D|U|[v]| - |D_G U[v]|, with D|U| taken by differencing |U|.
double diamagnetic_defect(const Field& field, const ConnectionForm& gamma, const QuadratureSpec& q);

/// The same defect over `count` random points of `region` and random unit directions.
double diamagnetic_defect(const Field& field, const ConnectionForm& gamma, const Box& region, int count,
                          std::uint64_t seed);

}  // namespace gaugetrace
