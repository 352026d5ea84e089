#pragma once

#include <string>
#include <utility>

#include "gaugetrace/connection.hpp"
#include "gaugetrace/field.hpp"
#include "gaugetrace/grid.hpp"
#include "gaugetrace/sobolev.hpp"

namespace gaugetrace {

/// Normalised bump y -> c_n exp(-1 / (1 - |y|^2)) on the unit ball of R^n.
class Mollifier {
 public:
  explicit Mollifier(int n);

  int dim() const { return n_; }
  double normalization() const { return c_n_; }
  double operator()(const Point& y) const;
  /// phi_t(y) = phi(y / t) / t^n.
  double scaled(const Point& y, double t) const;

 private:
  int n_;
  double c_n_;
};

struct ExtensionConfig {
  double beta = 0.0;
  double s = 0.5;
  double p = 2.0;
  QuadratureSpec grid;
  int steps = 64;
  int curvature_samples = 64;
  /// When set, the local convention beta >= |K| + 1/R^2 is enforced.
  double local_radius = 0.0;
};

/// 1.05 x measured curvature sup over the region, at least 1 / R^2 more
/// when a local radius is given.
double auto_beta(const ConnectionForm& gamma, const Box& region, int samples, double local_radius = 0.0);

/// Restriction to z = 0: the bottom node row of a sampled field, or x -> U(x, 0).
Field trace(const Field& field);

/// Transported mollification of u at every interior node of the half-space
/// grid, carried up vertically and damped by exp(-beta z^2). The bottom row
/// is u itself.
Field extend(const Field& boundary_field, const ConnectionForm& gamma, const ExtensionConfig& cfg);

/// max over lateral nodes of |U(x, z_1) - u(x)| at the first interior layer.
double first_layer_attainment(const Field& extended, const Field& boundary_field);

struct InequalityReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  int grid = 0;
  int steps = 0;
};

InequalityReport make_report(std::string name, double lhs, double rhs, int grid, int steps);

/// First: |trace U|^p in W^{s,p} against the weighted bulk integral with beta^{p/2} mass.
/// Second: |trace U|^p in L^p against (grad integral)^{1-s} (mass integral)^s.
std::pair<InequalityReport, InequalityReport> trace_inequality_report(const Field& field, const ConnectionForm& gamma,
                                                                      double s, double p, double beta,
                                                                      const QuadratureSpec& q, int steps);

/// First: weighted gradient integral of extend(u) against |u|^p_{W^{s,p}} + beta^{sp/2}|u|^p_{L^p}.
/// Second: weighted mass integral against beta^{-(1-s)p/2} |u|^p_{L^p}.
std::pair<InequalityReport, InequalityReport> extension_inequality_report(const Field& boundary_field,
                                                                          const ConnectionForm& gamma, double s,
                                                                          double p, double beta,
                                                                          const QuadratureSpec& q, int steps);

}  // namespace gaugetrace
