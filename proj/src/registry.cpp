#include "gaugetrace/registry.hpp"

#include <cmath>

#include "gaugetrace/error.hpp"

namespace gaugetrace {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& field, const std::string& what) {
  fail(ErrorKind::ConfigError, "field '" + field + "': " + what);
}

const json& require(const json& spec, const std::string& key, const std::string& path) {
  if (!spec.is_object() || !spec.contains(key)) bad(path + "." + key, "missing");
  return spec.at(key);
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) bad(path, "expected a number");
  return v.get<double>();
}

double number_or(const json& spec, const std::string& key, double fallback, const std::string& path) {
  if (!spec.contains(key)) return fallback;
  return number(spec.at(key), path + "." + key);
}

Vec vector_of(const json& v, int size, const std::string& path) {
  if (!v.is_array() || static_cast<int>(v.size()) != size) {
    bad(path, "expected an array of " + std::to_string(size) + " numbers");
  }
  Vec out(size);
  for (int i = 0; i < size; ++i) out(i) = number(v[i], path + "[" + std::to_string(i) + "]");
  return out;
}

Vec vector_or(const json& spec, const std::string& key, const Vec& fallback, const std::string& path) {
  if (!spec.contains(key)) return fallback;
  return vector_of(spec.at(key), static_cast<int>(fallback.size()), path + "." + key);
}

/// Scalar c -> cJ on m = 2, 3-vector -> hat map on m = 3, or a full m x m matrix.
lie::SkewMap skew_of(const json& v, int m, const std::string& path) {
  if (v.is_number()) {
    if (m != 2) bad(path, "scalar generators need m = 2");
    return v.get<double>() * lie::complex_unit();
  }
  if (v.is_array() && !v.empty() && v[0].is_number()) {
    if (m != 3) bad(path, "vector generators need m = 3");
    const Vec w = vector_of(v, 3, path);
    return lie::hat(Eigen::Vector3d(w(0), w(1), w(2)));
  }
  if (v.is_array() && static_cast<int>(v.size()) == m) {
    Mat a(m, m);
    for (int r = 0; r < m; ++r) {
      const Vec row = vector_of(v[r], m, path + "[" + std::to_string(r) + "]");
      a.row(r) = row.transpose();
    }
    try {
      return lie::SkewMap(a);
    } catch (const Error&) {
      bad(path, "matrix is not skew-symmetric");
    }
  }
  bad(path, "expected a scalar, a 3-vector or an m x m skew matrix");
}

std::vector<lie::SkewMap> skew_list(const json& v, int count, int m, const std::string& path) {
  if (!v.is_array() || static_cast<int>(v.size()) != count) {
    bad(path, "expected " + std::to_string(count) + " generators");
  }
  std::vector<lie::SkewMap> out;
  for (int i = 0; i < count; ++i) out.push_back(skew_of(v[i], m, path + "[" + std::to_string(i) + "]"));
  return out;
}

std::string family_of(const json& spec, const std::string& path) {
  const json& f = require(spec, "family", path);
  if (!f.is_string()) bad(path + ".family", "expected a string");
  return f.get<std::string>();
}

/// Rotation in the plane of the first two fiber axes.
Mat plane_generator(int m) {
  Mat s = Mat::Zero(m, m);
  s(1, 0) = 1.0;
  s(0, 1) = -1.0;
  return s;
}

}  // namespace

// -------------------------------------------------------------- connections

ConnectionForm make_connection(const json& spec, int d, int m) {
  const std::string path = "connection";
  const std::string family = family_of(spec, path);
  if (family == "zero") return ConnectionForm::zero(d, m);
  if (family == "constant-abelian") {
    if (m != 2) bad("m", "constant-abelian needs m = 2");
    const Vec a = vector_of(require(spec, "A", path), d, path + ".A");
    return ConnectionForm::abelian_magnetic(
        d, [a](const Point&) { return a; }, [d](const Point&) { return Mat(Mat::Zero(d, d)); }, "constant-abelian");
  }
  if (family == "flux-abelian") {
    if (m != 2) bad("m", "flux-abelian needs m = 2");
    if (d < 2) bad("n", "flux-abelian needs a domain of dimension >= 2");
    const double b = number(require(spec, "B", path), path + ".B");
    auto potential = [b, d](const Point& x) {
      Vec a = Vec::Zero(d);
      a(0) = -0.5 * b * x(1);
      a(1) = 0.5 * b * x(0);
      return a;
    };
    auto jacobian = [b, d](const Point&) {
      Mat j = Mat::Zero(d, d);
      j(0, 1) = -0.5 * b;
      j(1, 0) = 0.5 * b;
      return j;
    };
    return ConnectionForm::abelian_magnetic(d, potential, jacobian, "flux-abelian");
  }
  if (family == "constant-so3") {
    return ConnectionForm::constant(skew_list(require(spec, "G", path), d, m, path + ".G"));
  }
  if (family == "affine-so3") {
    const auto base = skew_list(require(spec, "base", path), d, m, path + ".base");
    const json& slope = require(spec, "slope", path);
    if (!slope.is_array() || static_cast<int>(slope.size()) != d) bad(path + ".slope", "expected d rows");
    std::vector<std::vector<lie::SkewMap>> slopes;
    for (int i = 0; i < d; ++i) {
      slopes.push_back(skew_list(slope[i], d, m, path + ".slope[" + std::to_string(i) + "]"));
    }
    return ConnectionForm::affine(base, slopes);
  }
  if (family == "gauge-wrapped") {
    const ConnectionForm inner = make_connection(require(spec, "inner", path), d, m);
    return gauge_transform(inner, make_gauge(require(spec, "gauge", path), d, m));
  }
  bad(path + ".family", "unknown connection family '" + family + "'");
}

std::optional<double> curvature_oracle(const json& spec, int d, int m) {
  const std::string family = family_of(spec, "connection");
  if (family == "zero" || family == "constant-abelian") return 0.0;
  if (family == "flux-abelian") return std::abs(number(require(spec, "B", "connection"), "connection.B"));
  if (family == "constant-so3" && d == 2) {
    const auto g = skew_list(require(spec, "G", "connection"), d, m, "connection.G");
    return lie::op_norm(lie::commutator(g[0], g[1]).matrix());
  }
  if (family == "gauge-wrapped") return curvature_oracle(require(spec, "inner", "connection"), d, m);
  return std::nullopt;
}

// ------------------------------------------------------------------- gauges

GaugeField make_gauge(const json& spec, int d, int m) {
  const std::string path = "gauge";
  const std::string family = family_of(spec, path);
  auto angle_factor = [d](const json& f, const std::string& where, lie::SkewMap generator) {
    const Vec gradient = vector_or(f, "gradient", Vec::Zero(d), where);
    const double amplitude = number_or(f, "amplitude", 0.0, where);
    const Vec frequency = vector_or(f, "frequency", Vec::Zero(d), where);
    GaugeField::Factor factor;
    factor.generator = std::move(generator);
    factor.angle = [gradient, amplitude, frequency](const Point& x) {
      return gradient.dot(x) + amplitude * std::sin(frequency.dot(x));
    };
    factor.gradient = [gradient, amplitude, frequency](const Point& x) {
      return Vec(gradient + amplitude * std::cos(frequency.dot(x)) * frequency);
    };
    return factor;
  };
  if (family == "identity") return GaugeField::identity(d, m);
  if (family == "theta") {
    if (m != 2) bad("m", "theta gauges need m = 2");
    return GaugeField::exp_product(d, {angle_factor(spec, path, lie::complex_unit())});
  }
  if (family == "exp-path") {
    const json& factors = require(spec, "factors", path);
    if (!factors.is_array() || factors.empty()) bad(path + ".factors", "expected a nonempty array");
    std::vector<GaugeField::Factor> out;
    for (std::size_t k = 0; k < factors.size(); ++k) {
      const std::string where = path + ".factors[" + std::to_string(k) + "]";
      out.push_back(angle_factor(factors[k], where, skew_of(require(factors[k], "generator", where), m,
                                                            where + ".generator")));
    }
    return GaugeField::exp_product(d, std::move(out));
  }
  bad(path + ".family", "unknown gauge family '" + family + "'");
}

// ------------------------------------------------------------------- fields

double BumpProfile::value(const Point& x) const {
  const double q = (x - centre).squaredNorm();
  const double r2 = radius * radius;
  if (q >= r2) return 0.0;
  const double e = gaussian ? std::exp(-q / (2.0 * width * width)) : 1.0;
  return amplitude * e * std::pow(1.0 - q / r2, 6);
}

namespace {

// f(q) = E(q) W(q) and its first two q-derivatives.
struct Radial {
  double f = 0.0;
  double f1 = 0.0;
  double f2 = 0.0;
};

Radial radial(const BumpProfile& b, double q) {
  Radial out;
  const double r2 = b.radius * b.radius;
  if (q >= r2) return out;
  const double w2 = b.width * b.width;
  const double e = b.gaussian ? std::exp(-q / (2.0 * w2)) : 1.0;
  const double e1 = b.gaussian ? -e / (2.0 * w2) : 0.0;
  const double e2 = b.gaussian ? e / (4.0 * w2 * w2) : 0.0;
  const double c = 1.0 - q / r2;
  const double w = std::pow(c, 6);
  const double w1 = -6.0 / r2 * std::pow(c, 5);
  const double w_2 = 30.0 / (r2 * r2) * std::pow(c, 4);
  out.f = e * w;
  out.f1 = e1 * w + e * w1;
  out.f2 = e2 * w + 2.0 * e1 * w1 + e * w_2;
  return out;
}

}  // namespace

Vec BumpProfile::gradient(const Point& x) const {
  const Vec y = x - centre;
  return amplitude * radial(*this, y.squaredNorm()).f1 * 2.0 * y;
}

Mat BumpProfile::hessian(const Point& x) const {
  const Vec y = x - centre;
  const Radial r = radial(*this, y.squaredNorm());
  const int d = static_cast<int>(x.size());
  return amplitude * (4.0 * r.f2 * y * y.transpose() + 2.0 * r.f1 * Mat::Identity(d, d));
}

Field make_field(const json& spec, int d, int m) {
  const std::string path = "field";
  const std::string family = family_of(spec, path);
  BumpProfile bump;
  bump.centre = vector_or(spec, "centre", Vec::Zero(d), path);
  bump.radius = number_or(spec, "radius", 1.5, path);
  bump.width = number_or(spec, "width", 0.6, path);
  bump.amplitude = number_or(spec, "amplitude", 1.0, path);
  if (!(bump.radius > 0.0)) bad(path + ".radius", "must be positive");
  if (!(bump.width > 0.0)) bad(path + ".width", "must be positive");
  Vec base = Vec::Zero(m);
  base(0) = 1.0;
  base = vector_or(spec, "direction", base, path);
  const double step = number_or(spec, "fd_step", Field::kDefaultStep, path);

  if (family == "gaussian-bump") {
    if (m < 2 && spec.contains("twist")) bad(path + ".twist", "twist needs m >= 2");
    const double k = number_or(spec, "twist", 0.0, path);
    const Mat s = m >= 2 ? plane_generator(m) : Mat(Mat::Zero(m, m));
    auto rotated = [base, s, k](const Point& x) {
      return FiberVec(lie::expm(lie::SkewMap(Mat(k * x(0) * s))).matrix() * base);
    };
    auto value = [bump, rotated](const Point& x) { return FiberVec(bump.value(x) * rotated(x)); };
    auto jacobian = [bump, rotated, s, k](const Point& x) {
      const FiberVec ta = rotated(x);
      Mat out = ta * bump.gradient(x).transpose();
      out.col(0) += bump.value(x) * k * (s * ta);
      return out;
    };
    auto second = [bump, rotated, s, k](const Point& x, const Vec& v, const Vec& w) {
      const FiberVec ta = rotated(x);
      const Vec g = bump.gradient(x);
      const FiberVec sta = s * ta;
      return FiberVec(ta * (v.dot(bump.hessian(x) * w)) + k * sta * (g.dot(v) * w(0) + g.dot(w) * v(0)) +
                      bump.value(x) * k * k * (s * sta) * v(0) * w(0));
    };
    return Field::analytic(d, m, value, jacobian, second).with_fd_step(step);
  }
  if (family == "windowed-linear" || family == "windowed-constant") {
    bump.gaussian = false;
    Mat slope = Mat::Zero(m, d);
    if (family == "windowed-linear") {
      const json& rows = require(spec, "slope", path);
      if (!rows.is_array() || static_cast<int>(rows.size()) != m) bad(path + ".slope", "expected m rows");
      for (int r = 0; r < m; ++r) {
        slope.row(r) = vector_of(rows[r], d, path + ".slope[" + std::to_string(r) + "]").transpose();
      }
    }
    const Point c = bump.centre;
    auto affine = [base, slope, c](const Point& x) { return FiberVec(base + slope * (x - c)); };
    auto value = [bump, affine](const Point& x) { return FiberVec(bump.value(x) * affine(x)); };
    auto jacobian = [bump, affine, slope](const Point& x) {
      return Mat(affine(x) * bump.gradient(x).transpose() + bump.value(x) * slope);
    };
    auto second = [bump, affine, slope](const Point& x, const Vec& v, const Vec& w) {
      const Vec g = bump.gradient(x);
      return FiberVec(affine(x) * v.dot(bump.hessian(x) * w) + slope * v * g.dot(w) + slope * w * g.dot(v));
    };
    return Field::analytic(d, m, value, jacobian, second).with_fd_step(step);
  }
  bad(path + ".family", "unknown field family '" + family + "'");
}

}  // namespace gaugetrace
