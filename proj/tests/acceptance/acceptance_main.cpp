// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "gaugetrace/cli.hpp"
#include "gaugetrace/connection.hpp"
#include "gaugetrace/error.hpp"
#include "gaugetrace/registry.hpp"
#include "gaugetrace/sobolev.hpp"
#include "gaugetrace/trace_ext.hpp"
#include "gaugetrace/transport.hpp"

using namespace gaugetrace;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Tally {
 public:
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass_ = false;
      if (!failures_.empty()) failures_ += "; ";
      failures_ += what;
    }
  }
  void note(const std::string& key, double value) {
    std::ostringstream s;
    s.precision(3);
    s << key << '=' << value;
    if (!notes_.empty()) notes_ += ' ';
    notes_ += s.str();
  }
  Outcome done() const { return {pass_, pass_ ? notes_ : failures_ + " | " + notes_}; }

 private:
  bool pass_ = true;
  std::string failures_;
  std::string notes_;
};

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

Point random_point(Rng& rng, int d, double half = 1.0, double height = 1.0) {
  Point x(d);
  for (int k = 0; k + 1 < d; ++k) x(k) = uniform(rng, -half, half);
  x(d - 1) = uniform(rng, 0.0, height);
  return x;
}

Vec random_unit(Rng& rng, int d) {
  std::normal_distribution<double> g;
  Vec v(d);
  for (int k = 0; k < d; ++k) v(k) = g(rng);
  return v.normalized();
}

json random_vector(Rng& rng, int size, double scale) {
  json out = json::array();
  for (int k = 0; k < size; ++k) out.push_back(uniform(rng, -scale, scale));
  return out;
}

json random_theta(Rng& rng, int d) {
  return {{"family", "theta"},
          {"gradient", random_vector(rng, d, 0.4)},
          {"amplitude", uniform(rng, 0.0, 0.5)},
          {"frequency", random_vector(rng, d, 1.2)}};
}

struct Draw {
  json spec;
  int m;
};

// One random member of each registry connection family, by index.
Draw random_connection(Rng& rng, int family, int d) {
  switch (family % 6) {
    case 0:
      return {{{"family", "zero"}}, 2 + static_cast<int>(rng() % 2)};
    case 1:
      return {{{"family", "constant-abelian"}, {"A", random_vector(rng, d, 1.0)}}, 2};
    case 2:
      return {{{"family", "flux-abelian"}, {"B", uniform(rng, 0.5, 2.0)}}, 2};
    case 3: {
      json g = json::array();
      for (int i = 0; i < d; ++i) g.push_back(random_vector(rng, 3, 0.6));
      return {{{"family", "constant-so3"}, {"G", g}}, 3};
    }
    case 4: {
      json base = json::array();
      json slope = json::array();
      for (int i = 0; i < d; ++i) {
        base.push_back(random_vector(rng, 3, 0.4));
        json row = json::array();
        for (int k = 0; k < d; ++k) row.push_back(random_vector(rng, 3, 0.2));
        slope.push_back(row);
      }
      return {{{"family", "affine-so3"}, {"base", base}, {"slope", slope}}, 3};
    }
    default:
      return {{{"family", "gauge-wrapped"},
               {"inner", {{"family", "flux-abelian"}, {"B", uniform(rng, 0.5, 2.0)}}},
               {"gauge", random_theta(rng, d)}},
              2};
  }
}

Path bent_curve(Rng& rng, int d) {
  const Point a = random_point(rng, d);
  const Point b = random_point(rng, d);
  const Vec bend = 0.4 * random_unit(rng, d);
  return Path::analytic(
      d, [a, b, bend](double t) { return Point((1 - t) * a + t * b + t * (1 - t) * bend); },
      [a, b, bend](double t) { return Vec(b - a + (1 - 2 * t) * bend); });
}

Eigen::MatrixXd dense(const Mat& a) { return Eigen::MatrixXd(a); }

double op_gap(const Mat& a, const Eigen::MatrixXd& b) {
  return (dense(a) - b).jacobiSvd().singularValues()(0);
}

cli::Scenario scenario(const std::string& name) {
  return cli::parse_scenario(json{{"preset", name}}.dump(), name);
}

struct Setup {
  cli::Scenario sc;
  ConnectionForm gamma;
  Field field;
  int d;
};

Setup setup(const std::string& name) {
  Setup s{scenario(name), {}, {}, 0};
  s.d = s.sc.n + 1;
  s.gamma = make_connection(s.sc.connection, s.d, s.sc.m);
  s.field = make_field(s.sc.field, s.d, s.sc.m);
  return s;
}

double relative(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// -------------------------------------------------------------------------

Outcome isometry_and_colinearity() {
  Rng rng(101);
  Tally t;
  double worst_ortho = 0.0;
  double worst_loop = 0.0;
  for (int k = 0; k < 200; ++k) {
    const int d = 2 + static_cast<int>(k % 2);
    const Draw draw = random_connection(rng, k, d);
    const ConnectionForm gamma = make_connection(draw.spec, d, draw.m);
    const Path path = k % 3 == 0 ? Path::segment(random_point(rng, d), random_point(rng, d)) : bent_curve(rng, d);
    worst_ortho = std::max(worst_ortho, transport_path(gamma, path, 128).ortho_defect);
    const Point x = random_point(rng, d);
    const Point y = random_point(rng, d);
    const Point z = x + uniform(rng, -0.5, 1.5) * (y - x);
    const Mat loop = transport_segment(gamma, x, y, 128).matrix() * transport_segment(gamma, y, z, 128).matrix() *
                     transport_segment(gamma, z, x, 128).matrix();
    worst_loop = std::max(worst_loop, op_gap(loop, Eigen::MatrixXd::Identity(draw.m, draw.m)));
  }
  t.require(worst_ortho <= 1e-10, "orthogonality defect above 1e-10");
  t.require(worst_loop <= 1e-9, "colinear loop above 1e-9");
  t.note("max_ortho", worst_ortho);
  t.note("max_colinear", worst_loop);
  return t.done();
}

Outcome constant_oracle() {
  Rng rng(202);
  Tally t;
  double worst = 0.0;
  double worst_angle = 0.0;
  double max_angle = 0.0;
  for (int k = 0; k < 50; ++k) {
    const int d = 2 + static_cast<int>(k % 2);
    const Draw draw = random_connection(rng, k % 2 == 0 ? 3 : 1, d);
    const ConnectionForm gamma = make_connection(draw.spec, d, draw.m);
    const Point x = random_point(rng, d);
    const Point y = random_point(rng, d);
    const Eigen::MatrixXd g = dense(gamma.eval_matrix(x, Vec(y - x)));
    const Eigen::MatrixXd oracle = g.exp();
    const double gap = op_gap(transport_segment(gamma, x, y, 256).matrix(), oracle);
    if (gap > worst) worst_angle = lie::op_norm(Mat(g));
    worst = std::max(worst, gap);
    max_angle = std::max(max_angle, lie::op_norm(Mat(g)));
  }
  t.require(worst <= 1e-10, "segment transport differs from the exponential");
  t.note("max_gap", worst);
  t.note("angle_at_max_gap", worst_angle);
  t.note("max_angle", max_angle);
  return t.done();
}

Outcome abelian_oracle() {
  Rng rng(303);
  Tally t;
  double worst = 0.0;
  for (double b : {0.5, 1.0, 2.0}) {
    for (int d : {2, 3}) {
      const ConnectionForm gamma = make_connection({{"family", "flux-abelian"}, {"B", b}}, d, 2);
      for (int k = 0; k < 20; ++k) {
        const Point x = random_point(rng, d, 1.5, 1.5);
        const Point y = random_point(rng, d, 1.5, 1.5);
        // Line integral of the symmetric-gauge potential along [x, y].
        const double phase = 0.5 * b * (x(0) * y(1) - x(1) * y(0));
        Eigen::MatrixXd oracle(2, 2);
        oracle << std::cos(phase), -std::sin(phase), std::sin(phase), std::cos(phase);
        worst = std::max(worst, op_gap(transport_segment(gamma, x, y, 256).matrix(), oracle));
      }
    }
  }
  t.require(worst <= 1e-8, "abelian transport differs from its phase");
  t.note("max_gap", worst);
  return t.done();
}

Outcome holonomy_bound() {
  Rng rng(404);
  Tally t;
  double worst_ratio = 0.0;
  double flat_defect = 0.0;
  int violations = 0;
  for (int family = 0; family < 6; ++family) {
    const Draw draw = random_connection(rng, family, 2);
    const ConnectionForm gamma = make_connection(draw.spec, 2, draw.m);
    for (int k = 0; k < 500; ++k) {
      // Flat connections have bound 0; their discrete defect is the 256-step transport error.
      const InequalityCheck c =
          holonomy_triangle(gamma, random_point(rng, 2), random_point(rng, 2), random_point(rng, 2), 256);
      if (!(c.lhs <= c.rhs * 1.05 + 1e-10)) ++violations;
      if (c.rhs > 0) worst_ratio = std::max(worst_ratio, c.lhs / c.rhs);
      if (c.rhs == 0) flat_defect = std::max(flat_defect, c.lhs);
    }
  }
  const ConnectionForm flux = make_connection({{"family", "flux-abelian"}, {"B", 1.0}}, 2, 2);
  Point x = Point::Zero(2), y = Point::Zero(2), z = Point::Zero(2);
  y(0) = 1.0;
  z(1) = 1.0;
  const InequalityCheck unit = holonomy_triangle(flux, x, y, z, 256);
  t.require(std::abs(unit.lhs - 2.0 * std::sin(0.25)) <= 1e-6, "unit triangle defect is not 2 sin(1/4)");
  t.require(std::abs(unit.rhs - 0.5) <= 1e-9, "unit triangle bound is not 1/2");
  t.require(violations == 0, std::to_string(violations) + " triangles above bound");
  t.note("worst_ratio", worst_ratio);
  t.note("flat_defect", flat_defect);
  t.note("unit_defect", unit.lhs);
  t.note("unit_bound", unit.rhs);
  return t.done();
}

Outcome gauge_covariance() {
  Tally t;
  Rng rng(505);
  for (const std::string name : {"abelian-n1", "so3-n1", "abelian-n2"}) {
    const Setup s = setup(name);
    const GaugeField phi = make_gauge(s.sc.gauge, s.d, s.sc.m);
    const ConnectionForm gauged = gauge_transform(s.gamma, phi);
    const Field gauged_field = gauge_apply(phi, s.field);
    double transport_gap = 0.0;
    double derivative_gap = 0.0;
    double curvature_gap = 0.0;
    for (int k = 0; k < 40; ++k) {
      const Point x = random_point(rng, s.d);
      const Point y = random_point(rng, s.d);
      const Mat qx = phi.value(x).matrix();
      const Mat r = transport_segment(s.gamma, x, y, 256).matrix();
      const Mat rg = transport_segment(gauged, x, y, 256).matrix();
      transport_gap = std::max(transport_gap, (rg * phi.value(y).matrix() - qx * r).norm() / r.norm());
      const Mat dp = covariant_derivative(s.field, s.gamma, x);
      derivative_gap = std::max(derivative_gap, (covariant_derivative(gauged_field, gauged, x) - qx * dp).norm() /
                                                    std::max(dp.norm(), 1e-3));
      const Vec v = random_unit(rng, s.d);
      const Vec w = random_unit(rng, s.d);
      const Mat kp = curvature(s.gamma, x, v, w).matrix();
      const Mat kt = curvature(gauged, x, v, w).matrix();
      curvature_gap = std::max(curvature_gap, (kt - qx * kp * qx.transpose()).norm() / std::max(kp.norm(), 1e-3));
    }
    QuadratureSpec q = s.sc.quadrature;
    const GagliardoParams params(s.sc.n, 0.5, 2.0);
    const Field u = trace(s.field);
    const GaugeField phi_b = phi.restrict_to_boundary();
    const double plain = gagliardo_seminorm(u, restrict_to_boundary(s.gamma), params, q, s.sc.steps).power;
    const double twisted =
        gagliardo_seminorm(gauge_apply(phi_b, u), restrict_to_boundary(gauged), params, q, s.sc.steps).power;
    const double seminorm_gap = relative(twisted, plain);

    ExtensionConfig cfg;
    cfg.grid = q;
    cfg.steps = s.sc.steps;
    cfg.beta = auto_beta(s.gamma, make_half_space_grid(s.sc.n, q).box(), 64);
    const Field e = extend(u, s.gamma, cfg);
    const Field eg = extend(gauge_apply(phi_b, u), gauged, cfg);
    double gap = 0.0;
    double scale = 0.0;
    for (std::size_t node = 0; node < e.grid().node_count(); ++node) {
      const FiberVec expect = phi.value(e.grid().node(node)).apply(e.node_value(node));
      gap = std::max(gap, (eg.node_value(node) - expect).norm());
      scale = std::max(scale, expect.norm());
    }
    const double extension_gap = gap / scale;

    t.require(transport_gap <= 1e-6, name + ": transport law");
    t.require(derivative_gap <= 1e-6, name + ": covariant derivative law");
    t.require(curvature_gap <= 1e-6, name + ": curvature law");
    t.require(seminorm_gap <= 1e-6, name + ": seminorm invariance");
    t.require(extension_gap <= 1e-6, name + ": extension equivariance");
    t.note(name + ".R", transport_gap);
    t.note(name + ".D", derivative_gap);
    t.note(name + ".K", curvature_gap);
    t.note(name + ".S", seminorm_gap);
    t.note(name + ".E", extension_gap);
  }
  return t.done();
}

Outcome ftc() {
  Tally t;
  Rng rng(606);
  for (const std::string name : {"abelian-n1", "so3-n1", "abelian-n2"}) {
    const Setup s = setup(name);
    double worst_order = 1e300;
    double worst_fine = 0.0;
    for (int k = 0; k < 5; ++k) {
      const Path path = bent_curve(rng, s.d);
      const double e16 = ftc_reconstruct(s.gamma, s.field, path, 16).defect;
      const double e32 = ftc_reconstruct(s.gamma, s.field, path, 32).defect;
      const double e512 = ftc_reconstruct(s.gamma, s.field, path, 512).defect;
      if (e32 > 1e-13) worst_order = std::min(worst_order, std::log2(e16 / e32));
      worst_fine = std::max(worst_fine, e512);
    }
    t.require(worst_order >= 2.0, name + ": observed order below 2");
    t.require(worst_fine <= 1e-6, name + ": defect above 1e-6 at 512 steps");
    t.note(name + ".order", worst_order);
    t.note(name + ".defect512", worst_fine);
  }
  return t.done();
}

Outcome commutator() {
  Tally t;
  Rng rng(707);
  for (const std::string name : {"abelian-n1", "so3-n1", "abelian-n2"}) {
    const Setup s = setup(name);
    double lo = 1e300;
    double hi = -1e300;
    for (int k = 0; k < 10; ++k) {
      const Point x = random_point(rng, s.d, 0.8, 0.8);
      const Vec v = random_unit(rng, s.d);
      const Vec w = random_unit(rng, s.d);
      const double e1 = commutator_defect(s.field, s.gamma, x, v, w, 1e-2);
      const double e2 = commutator_defect(s.field, s.gamma, x, v, w, 5e-3);
      const double e3 = commutator_defect(s.field, s.gamma, x, v, w, 2.5e-3);
      if (e3 < 1e-11) continue;
      const double slope = 0.5 * (std::log2(e1 / e2) + std::log2(e2 / e3));
      lo = std::min(lo, slope);
      hi = std::max(hi, slope);
    }
    t.require(lo >= 1.7 && hi <= 2.3, name + ": slope outside [1.7, 2.3]");
    t.note(name + ".min", lo);
    t.note(name + ".max", hi);
  }
  return t.done();
}

Outcome diamagnetic() {
  Tally t;
  std::uint64_t seed = 808;
  for (const std::string name : {"abelian-n1", "so3-n1", "zero-n1", "abelian-n2"}) {
    const Setup s = setup(name);
    Point lo = Point::Constant(s.d, -2.0);
    Point hi = Point::Constant(s.d, 2.0);
    lo(s.d - 1) = 0.0;
    hi(s.d - 1) = 1.0;
    const double defect = diamagnetic_defect(s.field, s.gamma, Box{lo, hi}, 10000, seed++);
    t.require(defect <= 1e-6, name + ": defect above 1e-6");
    t.note(name, defect);
  }
  return t.done();
}

Outcome parameter_derivative() {
  Tally t;
  Rng rng(909);
  for (const std::string name : {"abelian-n1", "so3-n1"}) {
    const Setup s = setup(name);
    const int d = s.d;
    double worst_ratio = 0.0;
    double worst_colinear = 0.0;
    for (int k = 0; k < 100; ++k) {
      const Point x0 = random_point(rng, d);
      const Point y0 = random_point(rng, d);
      const Vec a = 0.5 * random_unit(rng, d);
      const Vec b = 0.5 * random_unit(rng, d);
      const Vec c = 0.4 * random_unit(rng, d);
      const Homotopy h = Homotopy::make(
          d,
          [=](double tt, double ss) {
            return Point((1 - tt) * (x0 + ss * a) + tt * (y0 + ss * b) + ss * std::sin(M_PI * tt) * c);
          },
          0.0, 1.0);
      const ParameterDerivative pd = transport_parameter_derivative(s.gamma, h, uniform(rng, 0.2, 0.8), 256);
      const double lhs = lie::op_norm(pd.lhs);
      t.require(lhs <= pd.bound * 1.05 + 1e-12, name + ": derivative above bound");
      if (pd.bound > 0) worst_ratio = std::max(worst_ratio, lhs / pd.bound);

      const Point x = random_point(rng, d);
      const Vec dir = random_unit(rng, d);
      const Homotopy line =
          Homotopy::make(d, [=](double tt, double ss) { return Point(x + tt * (1.0 + ss) * dir); }, 0.0, 1.0);
      worst_colinear =
          std::max(worst_colinear, lie::op_norm(transport_parameter_derivative(s.gamma, line, 0.5, 256).lhs));
    }
    t.require(worst_colinear <= 1e-6, name + ": colinear homotopy above 1e-6");
    t.note(name + ".ratio", worst_ratio);
    t.note(name + ".colinear", worst_colinear);
  }
  return t.done();
}

Outcome extension_correctness() {
  Tally t;
  for (const std::string name : {"abelian-n1", "so3-n1"}) {
    const Setup s = setup(name);
    const Field u = trace(s.field);
    json other = s.sc.field;
    other["centre"] = {0.4, 0.0};
    other["radius"] = 0.9;
    other["width"] = 0.3;
    other["twist"] = -1.1;
    const Field u2 = trace(make_field(other, s.d, s.sc.m));
    ExtensionConfig cfg;
    cfg.grid = s.sc.quadrature;
    cfg.steps = s.sc.steps;
    cfg.beta = auto_beta(s.gamma, make_half_space_grid(s.sc.n, cfg.grid).box(), 64);

    const Field e1 = extend(u, s.gamma, cfg);
    const Field e2 = extend(u2, s.gamma, cfg);
    const Field mix = extend(u.combine(-1.5, u2, 3.0), s.gamma, cfg);
    double gap = 0.0;
    double scale = 0.0;
    for (std::size_t i = 0; i < mix.node_values().size(); ++i) {
      gap = std::max(gap, std::abs(mix.node_values()[i] + 1.5 * e1.node_values()[i] - 3.0 * e2.node_values()[i]));
      scale = std::max(scale, std::abs(mix.node_values()[i]));
    }
    t.require(gap <= 1e-12 * scale, name + ": extension is not linear");

    const Field back = trace(e1);
    double round_trip = 0.0;
    for (std::size_t node = 0; node < back.grid().node_count(); ++node) {
      round_trip = std::max(round_trip, (back.node_value(node) - u.value(back.grid().node(node))).norm());
    }
    t.require(round_trip <= 1e-8, name + ": trace of extension differs from u");

    std::vector<double> errors;
    std::vector<double> heights;
    for (int cells : {16, 32, 64}) {
      ExtensionConfig c = cfg;
      c.grid.vertical_cells = cells;
      errors.push_back(first_layer_attainment(extend(u, s.gamma, c), u));
      heights.push_back(graded_nodes(c.grid.height, cells, c.grid.grading)[1]);
    }
    double order = 1e300;
    for (int k = 0; k + 1 < 3; ++k) {
      order = std::min(order, std::log(errors[k] / errors[k + 1]) / std::log(heights[k] / heights[k + 1]));
    }
    t.require(order >= 1.0 - 1e-6, name + ": attainment order below 1");
    t.note(name + ".linearity", gap / scale);
    t.note(name + ".roundtrip", round_trip);
    t.note(name + ".order", order);
  }
  return t.done();
}

Outcome inequality_stability() {
  Tally t;
  for (const std::string name : {"abelian-n1", "so3-n1"}) {
    const Setup s = setup(name);
    const Field u = trace(s.field);
    for (double p : {2.0, 3.0}) {
      const double sv = 1.0 - 1.0 / p;
      std::vector<std::vector<double>> ratios(4);
      for (int cells : {32, 48, 64}) {
        QuadratureSpec q = s.sc.quadrature;
        q.lateral_cells = cells;
        const double beta = auto_beta(s.gamma, make_half_space_grid(s.sc.n, q).box(), 64);
        const auto tr = trace_inequality_report(s.field, s.gamma, sv, p, beta, q, s.sc.steps);
        const auto ex = extension_inequality_report(u, s.gamma, sv, p, beta, q, s.sc.steps);
        ratios[0].push_back(tr.first.ratio);
        ratios[1].push_back(tr.second.ratio);
        ratios[2].push_back(ex.first.ratio);
        ratios[3].push_back(ex.second.ratio);
      }
      const char* labels[] = {"trace-seminorm", "trace-lp", "extension-gradient", "extension-mass"};
      for (int k = 0; k < 4; ++k) {
        const auto [lo, hi] = std::minmax_element(ratios[k].begin(), ratios[k].end());
        const bool finite = std::all_of(ratios[k].begin(), ratios[k].end(),
                                        [](double r) { return std::isfinite(r) && r > 0.0; });
        const double spread = *hi / *lo - 1.0;
        const std::string tag = name + ".p" + std::to_string(static_cast<int>(p)) + "." + labels[k];
        t.require(finite, tag + " diverges");
        t.require(spread <= 0.10, tag + " varies by more than 10%");
        t.note(tag, spread);
      }
    }
  }
  return t.done();
}

Outcome pullback_compatibility() {
  Tally t;
  Rng rng(1212);
  for (const std::string name : {"abelian-n1", "so3-n1", "abelian-n2"}) {
    const Setup s = setup(name);
    const int d = s.d;
    Mat rotation = Mat::Identity(d, d);
    rotation.topLeftCorner(2, 2) << std::cos(0.4), -std::sin(0.4), std::sin(0.4), std::cos(0.4);
    for (const Chart& psi : {Chart::identity(d), Chart::dilation(d, 1.5), Chart::linear(rotation, "rotation"),
                             Chart::shear(d, 0.2)}) {
      const ConnectionForm pulled = pullback(s.gamma, psi);
      const Field composed = compose(s.field, psi);
      double worst = 0.0;
      for (int k = 0; k < 50; ++k) {
        const Point x = random_point(rng, d);
        worst = std::max(worst, (covariant_derivative(composed, pulled, x) -
                                 pullback_covariant_derivative(s.field, s.gamma, psi, x))
                                    .norm());
      }
      t.require(worst <= 1e-6, name + "." + psi.name() + " above 1e-6");
      t.note(name + "." + psi.name(), worst);
    }
  }
  return t.done();
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"isometry and colinear loops", isometry_and_colinearity},
      {"constant-connection exponential oracle", constant_oracle},
      {"abelian phase oracle", abelian_oracle},
      {"holonomy bound and unit-triangle flux", holonomy_bound},
      {"gauge covariance suite", gauge_covariance},
      {"covariant FTC reconstruction", ftc},
      {"commutator identity convergence", commutator},
      {"diamagnetic inequality", diamagnetic},
      {"parameter-derivative bound", parameter_derivative},
      {"extension linearity, round trip, attainment", extension_correctness},
      {"trace/extension ratio stability", inequality_stability},
      {"pullback compatibility", pullback_compatibility},
  };
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome out;
    try {
      out = criteria[k].second();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    if (!out.pass) ++failures;
    std::printf("%s %2zu %s: %s\n", out.pass ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(),
                out.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
