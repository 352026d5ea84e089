#pragma once

#include <optional>
#include <string>

#include "json.hpp"

#include "gaugetrace/connection.hpp"
#include "gaugetrace/field.hpp"

namespace gaugetrace {

/// Builders for the named connection, gauge and field families.
///
/// Connections: zero, constant-abelian {A}, flux-abelian {B},
/// constant-so3 {G: one hat vector per direction}, affine-so3 {base, slope},
/// gauge-wrapped {inner, gauge}.
/// Gauges: theta {gradient, amplitude, frequency} on m = 2,
/// exp-path {factors: [{generator, gradient, amplitude, frequency}]}.
/// Fields: gaussian-bump, windowed-linear, windowed-constant.
/// Malformed specs throw ConfigError naming the offending field.
ConnectionForm make_connection(const nlohmann::json& spec, int dim_domain, int dim_fiber);
GaugeField make_gauge(const nlohmann::json& spec, int dim_domain, int dim_fiber);
Field make_field(const nlohmann::json& spec, int dim_domain, int dim_fiber);

/// Closed-form curvature sup over any region for families that have one.
std::optional<double> curvature_oracle(const nlohmann::json& spec, int dim_domain, int dim_fiber);

/// Smooth compactly supported profile g(x) = amp exp(-|x-c|^2 / (2 w^2)) (1 - |x-c|^2 / R^2)^6.
struct BumpProfile {
  Point centre;
  double width = 1.0;
  double radius = 1.0;
  double amplitude = 1.0;
  bool gaussian = true;

  double value(const Point& x) const;
  Vec gradient(const Point& x) const;
  Mat hessian(const Point& x) const;
};

}  // namespace gaugetrace
