#pragma once

#include <functional>
#include <memory>
#include <type_traits>
#include <vector>

#include "gaugetrace/grid.hpp"
#include "gaugetrace/types.hpp"

namespace gaugetrace {

/// F-valued function on a domain of R^d, analytic or sampled on a grid.
///
/// Analytic fields carry closed-form derivatives when available; otherwise
/// derivatives fall back to fourth-order central differences with step
/// `fd_step()`. Sampled fields are multilinear interpolants of node data and
/// differentiate the interpolant.
class Field {
 public:
  using ValueFn = std::function<FiberVec(const Point&)>;
  /// Returns the m x d Jacobian DU(x).
  using JacobianFn = std::function<Mat(const Point&)>;
  /// Returns D^2 U(x)[v, w].
  using SecondFn = std::function<FiberVec(const Point&, const Vec&, const Vec&)>;

  static constexpr double kDefaultStep = 1e-3;

  Field() = default;

  static Field analytic(int dim_domain, int dim_fiber, ValueFn value, JacobianFn jacobian = {},
                        SecondFn second = {});
  /// Node values are stored row-major: values[node * m + component].
  static Field sampled(RectilinearGrid grid, int dim_fiber, std::vector<double> values);
  static Field zero(int dim_domain, int dim_fiber);

  int dim_domain() const;
  int dim_fiber() const;

  FiberVec value(const Point& x) const;
  Mat jacobian(const Point& x) const;
  FiberVec second_derivative(const Point& x, const Vec& v, const Vec& w) const;

  bool has_analytic_jacobian() const;
  bool has_analytic_second() const;
  bool is_sampled() const;
  const RectilinearGrid& grid() const;
  const std::vector<double>& node_values() const;
  FiberVec node_value(std::size_t node) const;

  double fd_step() const;
  Field with_fd_step(double step) const;

  /// Linear combination a*this + b*other; sampled operands must share a grid.
  Field combine(double a, const Field& other, double b) const;
  Field scaled(double a) const;

 private:
  struct Data;
  std::shared_ptr<const Data> data_;
};

/// Boundary fields are fields on R^n.
using BoundaryField = Field;

enum class SupportLayout {
  HalfSpace,  // last axis vertical: zero on two outer lateral layers and the top layer
  Boundary,   // zero collar of two cells on every axis
};

/// Throws UnsupportedField when sampled data violates the compact-support collar.
void require_compact_support(const Field& field, SupportLayout layout);

/// Samples an analytic field at every node of `grid`.
Field sample_on(const Field& field, const RectilinearGrid& grid);

/// Fourth-order central difference of f along v at x with step h.
template <typename F>
auto central_difference4(const F& f, const Point& x, const Vec& v, double h) {
  using Result = std::decay_t<decltype(f(x))>;
  const Point p2 = x + 2.0 * h * v, p1 = x + h * v, m1 = x - h * v, m2 = x - 2.0 * h * v;
  Result out = (-f(p2) + 8.0 * f(p1) - 8.0 * f(m1) + f(m2)) / (12.0 * h);
  return out;
}

}  // namespace gaugetrace
