#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gaugetrace/field.hpp"
#include "gaugetrace/grid.hpp"
#include "gaugetrace/lie.hpp"

namespace gaugetrace {

/// Pointwise orthogonal change of fiber frame phi: R^d -> O(F).
class GaugeField {
 public:
  using ValueFn = std::function<Mat(const Point&)>;
  /// Returns D phi(x)[v].
  using DerivativeFn = std::function<Mat(const Point&, const Vec&)>;

  /// One factor exp(angle(x) * generator) of a product gauge.
  struct Factor {
    lie::SkewMap generator;
    std::function<double(const Point&)> angle;
    std::function<Vec(const Point&)> gradient;
  };

  GaugeField() = default;
  static GaugeField make(int dim_domain, int dim_fiber, ValueFn value, DerivativeFn derivative = {});
  static GaugeField identity(int dim_domain, int dim_fiber);
  /// phi(x) = exp(a_1(x) G_1) ... exp(a_k(x) G_k), derivative in closed form.
  static GaugeField exp_product(int dim_domain, std::vector<Factor> factors);

  int dim_domain() const { return dim_domain_; }
  int dim_fiber() const { return dim_fiber_; }

  /// Throws NonOrthogonalGauge when phi(x) is not orthogonal to 1e-10.
  lie::OrthoOp value(const Point& x) const;
  Mat derivative(const Point& x, const Vec& v) const;
  bool has_analytic_derivative() const { return bool(derivative_); }

  double fd_step() const { return fd_step_; }
  GaugeField with_fd_step(double step) const;
  /// phi restricted to the boundary hyperplane: x -> phi(x, 0).
  GaugeField restrict_to_boundary() const;

 private:
  int dim_domain_ = 0;
  int dim_fiber_ = 0;
  double fd_step_ = 1e-3;
  ValueFn value_;
  DerivativeFn derivative_;
};

/// Diffeomorphism psi: W -> Omega between domains of R^d.
class Chart {
 public:
  using MapFn = std::function<Point(const Point&)>;
  using JacobianFn = std::function<Mat(const Point&)>;

  static constexpr double kMaxCondition = 1e6;

  Chart() = default;
  static Chart make(int dim, std::string name, MapFn map, JacobianFn jacobian, MapFn inverse = {});
  static Chart identity(int dim);
  static Chart dilation(int dim, double factor);
  static Chart linear(const Mat& matrix, std::string name = "linear");
  /// psi(x) = x + amplitude * sin(x_last) e_0 : a smooth shear.
  static Chart shear(int dim, double amplitude);

  int dim() const { return dim_; }
  const std::string& name() const { return name_; }
  Point map(const Point& x) const { return map_(x); }
  /// Throws InvalidArgument when D psi(x) has condition number >= 1e6.
  Mat jacobian(const Point& x) const;
  std::optional<Point> inverse(const Point& y) const;

 private:
  int dim_ = 0;
  std::string name_;
  MapFn map_;
  JacobianFn jacobian_;
  MapFn inverse_;
};

/// Connection form x -> Lin(R^d, o(F)).
///
/// Every evaluation returns a skew matrix and is linear in the direction.
/// Derivatives D Gamma(x)[v, w] = d/dt Gamma(x + t v)[w] are closed-form for
/// the analytic families and fourth-order central differences otherwise.
class ConnectionForm {
 public:
  class Impl;

  ConnectionForm() = default;
  explicit ConnectionForm(std::shared_ptr<const Impl> impl);

  static ConnectionForm zero(int dim_domain, int dim_fiber);
  /// Gamma(x)[v] = sum_i v_i G_i.
  static ConnectionForm constant(std::vector<lie::SkewMap> coefficients);
  /// Gamma(x)[v] = (A(x) . v) J on F = C = R^2; `jacobian(x)` is DA(x) (row i = grad A_i).
  static ConnectionForm abelian_magnetic(int dim_domain, std::function<Vec(const Point&)> potential,
                                         std::function<Mat(const Point&)> jacobian, std::string name);
  /// Gamma_i(x) = base_i + sum_k x_k slopes[i][k].
  static ConnectionForm affine(std::vector<lie::SkewMap> base, std::vector<std::vector<lie::SkewMap>> slopes);
  /// Node data: values[node * d*m*m + i*m*m + r*m + c], coefficient i, entry (r, c).
  static ConnectionForm sampled(RectilinearGrid grid, int dim_fiber, std::vector<double> values);

  int dim_domain() const;
  int dim_fiber() const;
  const Box& domain() const;
  std::string describe() const;

  /// Throws OutOfDomain outside `domain()`.
  Mat eval_matrix(const Point& x, const Vec& v) const;
  lie::SkewMap eval(const Point& x, const Vec& v) const;
  Mat derivative(const Point& x, const Vec& v, const Vec& w) const;
  bool has_analytic_derivative() const;

  double fd_step() const;
  ConnectionForm with_fd_step(double step) const;
  ConnectionForm with_domain(const Box& domain) const;

  const Impl& impl() const { return *impl_; }

 private:
  std::shared_ptr<const Impl> impl_;
  std::optional<double> fd_step_;
  std::optional<Box> domain_;
};

class ConnectionForm::Impl {
 public:
  Impl(int dim_domain, int dim_fiber, Box domain);
  virtual ~Impl() = default;

  int dim_domain() const { return dim_domain_; }
  int dim_fiber() const { return dim_fiber_; }
  const Box& domain() const { return domain_; }

  virtual Mat eval(const Point& x, const Vec& v) const = 0;
  /// Closed-form D Gamma(x)[v, w] when available.
  virtual std::optional<Mat> analytic_derivative(const Point& x, const Vec& v, const Vec& w) const;
  virtual std::string describe() const = 0;

 private:
  int dim_domain_;
  int dim_fiber_;
  Box domain_;
};

lie::SkewMap eval_connection(const ConnectionForm& gamma, const Point& x, const Vec& v);

/// D_Gamma U(x) as the m x d matrix h -> DU(x)[h] + Gamma(x)[h] U(x).
Mat covariant_derivative(const Field& field, const ConnectionForm& gamma, const Point& x);

/// K(x)[v, w] = D Gamma[v, w] - D Gamma[w, v] + [Gamma[v], Gamma[w]].
lie::SkewMap curvature(const ConnectionForm& gamma, const Point& x, const Vec& v, const Vec& w);

/// Sup over sampled points of the box and an orthonormal direction-pair sweep
/// of op_norm(K(x)[v, w]). Sample sets are nested in `samples`.
double curvature_sup_norm(const ConnectionForm& gamma, const Box& region, int samples,
                          std::uint64_t seed = 0x5eedULL);

/// Gamma' = -(D phi) phi^{-1} + phi Gamma phi^{-1}.
ConnectionForm gauge_transform(const ConnectionForm& gamma, const GaugeField& phi);

/// (psi^* Gamma)(x)[v] = Gamma(psi(x))[D psi(x) v].
ConnectionForm pullback(const ConnectionForm& gamma, const Chart& psi, std::optional<Box> domain = {});

/// Boundary connection Gamma_par(x)[v] = Gamma(x, 0)[(v, 0)] on R^n.
ConnectionForm restrict_to_boundary(const ConnectionForm& gamma);

/// |D_G(D_G U[w])[v] - D_G(D_G U[v])[w] - K[v, w] U| at x. With `step` the
/// outer derivative is a second-order central difference; without it the
/// closed-form second-order expansion is used.
double commutator_defect(const Field& field, const ConnectionForm& gamma, const Point& x, const Vec& v,
                         const Vec& w, std::optional<double> step);

/// The gauged field x -> phi(x) U(x).
Field gauge_apply(const GaugeField& phi, const Field& field);

/// U o psi; its Jacobian is taken by finite differences, independently of the chain rule.
Field compose(const Field& field, const Chart& psi);

/// psi^*(D_Gamma U)(x) = D_Gamma U(psi(x)) o D psi(x).
Mat pullback_covariant_derivative(const Field& field, const ConnectionForm& gamma, const Chart& psi,
                                  const Point& x);

}  // namespace gaugetrace
