#include "gaugetrace/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "gaugetrace/connection.hpp"
#include "gaugetrace/error.hpp"
#include "gaugetrace/io.hpp"
#include "gaugetrace/registry.hpp"
#include "gaugetrace/sobolev.hpp"
#include "gaugetrace/trace_ext.hpp"
#include "gaugetrace/transport.hpp"

namespace gaugetrace::cli {

using nlohmann::json;

// ------------------------------------------------------------------ presets

nlohmann::json preset(const std::string& name) {
  const json quadrature = {{"lateral_half_width", 3.0}, {"lateral_cells", 32}, {"height", 1.0},
                           {"vertical_cells", 16},      {"grading", 2.0},     {"exclusion_radius", 1}};
  if (name == "abelian-n1") {
    return {{"n", 1},
            {"m", 2},
            {"connection", {{"family", "flux-abelian"}, {"B", 1.0}}},
            {"field", {{"family", "gaussian-bump"}, {"width", 0.6}, {"radius", 1.8}, {"twist", 0.5}}},
            {"gauge", {{"family", "theta"}, {"gradient", {0.3, -0.2}}, {"amplitude", 0.4}, {"frequency", {1.1, 0.7}}}},
            {"analysis", {{"p", {2.0, 3.0}}, {"beta", "auto"}}},
            {"quadrature", quadrature},
            {"steps", 128},
            {"seed", 1},
            {"refine", 3}};
  }
  if (name == "so3-n1") {
    return {{"n", 1},
            {"m", 3},
            {"connection",
             {{"family", "affine-so3"},
              {"base", {{0.3, 0.0, 0.0}, {0.0, 0.2, 0.0}}},
              {"slope", {{{0.0, 0.0, 0.2}, {0.1, 0.0, 0.0}}, {{0.0, 0.1, 0.0}, {0.0, 0.0, 0.15}}}}}},
            {"field",
             {{"family", "gaussian-bump"}, {"width", 0.6}, {"radius", 1.8}, {"twist", 0.4}, {"direction", {1.0, 0.5, 0.0}}}},
            {"gauge",
             {{"family", "exp-path"},
              {"factors",
               {{{"generator", {0.0, 0.0, 1.0}}, {"gradient", {0.2, 0.1}}, {"amplitude", 0.3}, {"frequency", {0.9, 0.4}}},
                {{"generator", {1.0, 0.0, 0.0}}, {"gradient", {-0.1, 0.25}}}}}}},
            {"analysis", {{"p", {2.0, 3.0}}, {"beta", "auto"}}},
            {"quadrature", quadrature},
            {"steps", 128},
            {"seed", 2},
            {"refine", 3}};
  }
  if (name == "zero-n1") {
    return {{"n", 1},
            {"m", 2},
            {"connection", {{"family", "zero"}}},
            {"field", {{"family", "gaussian-bump"}, {"width", 0.6}, {"radius", 1.8}}},
            {"analysis", {{"p", {2.0}}, {"beta", 1.0}}},
            {"quadrature", quadrature},
            {"steps", 64},
            {"seed", 3},
            {"refine", 2}};
  }
  if (name == "abelian-n2") {
    json q = quadrature;
    q["lateral_cells"] = 16;
    q["vertical_cells"] = 8;
    return {{"n", 2},
            {"m", 2},
            {"connection", {{"family", "flux-abelian"}, {"B", 1.0}}},
            {"field", {{"family", "gaussian-bump"}, {"width", 0.6}, {"radius", 1.8}, {"twist", 0.5}}},
            {"gauge",
             {{"family", "theta"}, {"gradient", {0.3, -0.2, 0.1}}, {"amplitude", 0.4}, {"frequency", {1.1, 0.7, 0.5}}}},
            {"analysis", {{"p", {2.0}}, {"beta", "auto"}}},
            {"quadrature", q},
            {"steps", 64},
            {"seed", 4},
            {"refine", 1},
            {"draws", {{"transport", 10}, {"triangles", 40}, {"homotopies", 8}, {"diamagnetic", 500}, {"pullback", 20}}}};
  }
  fail(ErrorKind::ConfigError, "field 'preset': unknown preset '" + name + "'");
}

std::vector<std::string> preset_names() { return {"abelian-n1", "so3-n1", "zero-n1", "abelian-n2"}; }

// ------------------------------------------------------------------ parsing

namespace {

[[noreturn]] void bad(const std::string& field, const std::string& what) {
  fail(ErrorKind::ConfigError, "field '" + field + "': " + what);
}

int line_of(const std::string& text, std::size_t byte) {
  const std::size_t end = std::min(byte, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(end), '\n'));
}

double get_number(const json& obj, const std::string& key, double fallback, const std::string& path) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_number()) bad(path + key, "expected a number");
  return obj.at(key).get<double>();
}

int get_int(const json& obj, const std::string& key, int fallback, const std::string& path) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_number_integer()) bad(path + key, "expected an integer");
  return obj.at(key).get<int>();
}

}  // namespace

std::vector<int> Scenario::lateral_levels() const {
  std::vector<int> out;
  const int base = quadrature.lateral_cells;
  for (int k = 0; k < std::max(1, refine); ++k) out.push_back(base + k * base / 2);
  return out;
}

Scenario parse_scenario(const std::string& text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::ConfigError, origin + ": line " + std::to_string(line_of(text, e.byte)) + ": malformed JSON");
  }
  if (!doc.is_object()) fail(ErrorKind::ConfigError, origin + ": top level must be an object");
  if (doc.contains("preset")) {
    if (!doc["preset"].is_string()) bad("preset", "expected a string");
    json merged = preset(doc["preset"].get<std::string>());
    merged.merge_patch(doc);
    doc = std::move(merged);
  }

  Scenario sc;
  sc.raw = doc;
  if (!doc.contains("n")) bad("n", "missing");
  if (!doc.contains("m")) bad("m", "missing");
  sc.n = get_int(doc, "n", 1, "");
  sc.m = get_int(doc, "m", 2, "");
  if (sc.n < 1 || sc.n + 1 > kMaxDim) bad("n", "must be in 1..3");
  if (sc.m < 1 || sc.m > kMaxDim) bad("m", "must be in 1..4");
  if (!doc.contains("connection")) bad("connection", "missing");
  sc.connection = doc["connection"];
  sc.field = doc.value("field", json{{"family", "gaussian-bump"}});
  sc.gauge = doc.contains("gauge") ? doc["gauge"] : json();

  if (doc.contains("analysis")) {
    const json& a = doc["analysis"];
    if (!a.is_object()) bad("analysis", "expected an object");
    if (a.contains("p")) {
      sc.p_values.clear();
      const json& p = a["p"];
      if (p.is_number()) {
        sc.p_values.push_back(p.get<double>());
      } else if (p.is_array() && !p.empty()) {
        for (const auto& v : p) {
          if (!v.is_number()) bad("analysis.p", "expected numbers");
          sc.p_values.push_back(v.get<double>());
        }
      } else {
        bad("analysis.p", "expected a number or a nonempty array");
      }
      for (double p_value : sc.p_values) {
        if (!(p_value > 1.0)) bad("analysis.p", "each p must exceed 1");
      }
    }
    if (a.contains("s")) {
      if (!a["s"].is_number()) bad("analysis.s", "expected a number");
      sc.s = a["s"].get<double>();
      if (!(*sc.s > 0.0 && *sc.s < 1.0)) bad("analysis.s", "must lie in (0, 1)");
    }
    if (a.contains("beta")) {
      const json& b = a["beta"];
      if (b.is_number()) {
        sc.beta = b.get<double>();
        if (*sc.beta < 0.0) bad("analysis.beta", "must be nonnegative");
      } else if (!(b.is_string() && b.get<std::string>() == "auto")) {
        bad("analysis.beta", "expected a number or \"auto\"");
      }
    }
  }
  if (doc.contains("quadrature")) {
    const json& q = doc["quadrature"];
    if (!q.is_object()) bad("quadrature", "expected an object");
    QuadratureSpec& spec = sc.quadrature;
    spec.lateral_half_width = get_number(q, "lateral_half_width", spec.lateral_half_width, "quadrature.");
    spec.lateral_cells = get_int(q, "lateral_cells", spec.lateral_cells, "quadrature.");
    spec.height = get_number(q, "height", spec.height, "quadrature.");
    spec.vertical_cells = get_int(q, "vertical_cells", spec.vertical_cells, "quadrature.");
    spec.grading = get_number(q, "grading", spec.grading, "quadrature.");
    spec.exclusion_radius = get_int(q, "exclusion_radius", spec.exclusion_radius, "quadrature.");
    try {
      spec.validate();
    } catch (const Error& e) {
      bad("quadrature", e.what());
    }
  }
  sc.steps = get_int(doc, "steps", sc.steps, "");
  if (sc.steps < 8 || sc.steps % 2 != 0) bad("steps", "must be an even integer >= 8");
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_integer() || doc["seed"].get<std::int64_t>() < 0) {
      bad("seed", "expected a nonnegative integer");
    }
    sc.seed = doc["seed"].get<std::uint64_t>();
  }
  sc.refine = get_int(doc, "refine", sc.refine, "");
  if (sc.refine < 1) bad("refine", "must be >= 1");
  if (doc.contains("region")) {
    const json& r = doc["region"];
    sc.region_half_width = get_number(r, "half_width", sc.region_half_width, "region.");
    sc.region_height = get_number(r, "height", sc.region_height, "region.");
    if (!(sc.region_half_width > 0.0 && sc.region_height > 0.0)) bad("region", "extents must be positive");
  }
  if (doc.contains("draws")) {
    const json& d = doc["draws"];
    sc.draws.transport = get_int(d, "transport", sc.draws.transport, "draws.");
    sc.draws.triangles = get_int(d, "triangles", sc.draws.triangles, "draws.");
    sc.draws.homotopies = get_int(d, "homotopies", sc.draws.homotopies, "draws.");
    sc.draws.diamagnetic = get_int(d, "diamagnetic", sc.draws.diamagnetic, "draws.");
    sc.draws.pullback = get_int(d, "pullback", sc.draws.pullback, "draws.");
    sc.draws.commutator = get_int(d, "commutator", sc.draws.commutator, "draws.");
  }

  // Build every registry object once so malformed specs fail at load.
  make_connection(sc.connection, sc.n + 1, sc.m);
  make_field(sc.field, sc.n + 1, sc.m);
  if (!sc.gauge.is_null()) make_gauge(sc.gauge, sc.n + 1, sc.m);
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::ConfigError, "cannot read config '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path);
}

// ---------------------------------------------------------------- checking

namespace {

constexpr double kRoundoff = 1e-12;

struct Context {
  const Scenario& sc;
  VerificationReport& report;
  std::string suite;
  std::mt19937_64 rng;

  Context(const Scenario& s, VerificationReport& r, std::string name)
      : sc(s), report(r), suite(std::move(name)), rng(seed_for(s, suite)) {}

  static std::uint64_t seed_for(const Scenario& s, const std::string& suite) {
    if (!s.seed) fail(ErrorKind::ConfigError, "field 'seed': required for randomized checks");
    return *s.seed ^ std::hash<std::string>{}(suite);
  }

  ReportRow row(const std::string& check, const std::string& property) const {
    ReportRow r;
    r.suite = suite;
    r.check = check;
    r.n = sc.n;
    r.m = sc.m;
    r.property = property;
    return r;
  }

  /// lhs <= tolerance.
  void at_most(const std::string& check, double lhs, double tolerance, const std::string& property) {
    ReportRow r = row(check, property);
    r.lhs = lhs;
    r.rhs = tolerance;
    r.tolerance = tolerance;
    r.ratio = tolerance > 0.0 ? lhs / tolerance : 0.0;
    r.status = lhs <= tolerance ? RowStatus::Pass : RowStatus::Fail;
    report.add(r);
  }

  /// lhs <= rhs (1 + slack).
  void inequality(const std::string& check, double lhs, double rhs, double slack, const std::string& property) {
    ReportRow r = row(check, property);
    r.lhs = lhs;
    r.rhs = rhs;
    r.tolerance = slack;
    r.ratio = rhs > 0.0 ? lhs / rhs : (lhs == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
    r.status = lhs <= rhs * (1.0 + slack) + kRoundoff ? RowStatus::Pass : RowStatus::Fail;
    report.add(r);
  }

  void within(const std::string& check, double value, double lo, double hi, const std::string& property) {
    ReportRow r = row(check, property);
    r.lhs = value;
    r.rhs = hi;
    r.ratio = lo;
    r.tolerance = hi - lo;
    r.status = value >= lo && value <= hi ? RowStatus::Pass : RowStatus::Fail;
    report.add(r);
  }

  void info(ReportRow r) {
    r.status = RowStatus::Info;
    report.add(std::move(r));
  }

  /// Runs a check body; module errors become error rows.
  void guarded(const std::string& check, const std::function<void()>& body) {
    try {
      body();
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::ConfigError) throw;
      ReportRow r = row(check, std::string("module error: ") + e.what());
      r.status = RowStatus::Error;
      report.add(r);
    }
  }

  Point random_point() {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const int d = sc.n + 1;
    Point x(d);
    for (int k = 0; k < sc.n; ++k) x(k) = (2.0 * u(rng) - 1.0) * sc.region_half_width;
    x(d - 1) = u(rng) * sc.region_height;
    return x;
  }

  Vec random_unit() {
    std::normal_distribution<double> g;
    Vec v(sc.n + 1);
    for (int k = 0; k <= sc.n; ++k) v(k) = g(rng);
    return v.normalized();
  }

  Box region() const {
    Point lo = Point::Constant(sc.n + 1, -sc.region_half_width);
    Point hi = Point::Constant(sc.n + 1, sc.region_half_width);
    lo(sc.n) = 0.0;
    hi(sc.n) = sc.region_height;
    return Box{lo, hi};
  }
};

ConnectionForm connection_of(const Scenario& sc) { return make_connection(sc.connection, sc.n + 1, sc.m); }
Field field_of(const Scenario& sc) { return make_field(sc.field, sc.n + 1, sc.m); }
bool has_gauge(const Scenario& sc) { return !sc.gauge.is_null(); }
GaugeField gauge_of(const Scenario& sc) { return make_gauge(sc.gauge, sc.n + 1, sc.m); }
std::string family_name(const Scenario& sc) { return sc.connection.value("family", std::string()); }

double beta_for(const Scenario& sc, const ConnectionForm& gamma, const QuadratureSpec& q) {
  if (sc.beta) return *sc.beta;
  return auto_beta(gamma, make_half_space_grid(sc.n, q).box(), 64);
}

Path random_curve(Context& ctx) {
  const Point a = ctx.random_point();
  const Point b = ctx.random_point();
  const Vec bend = 0.3 * ctx.random_unit();
  return Path::analytic(
      ctx.sc.n + 1, [a, b, bend](double t) { return Point((1 - t) * a + t * b + t * (1 - t) * bend); },
      [a, b, bend](double t) { return Vec(b - a + (1 - 2 * t) * bend); }, "bent-segment");
}

// Exact transport for connections whose segment integrand has a closed form.
std::optional<Mat> segment_oracle(const Scenario& sc, const ConnectionForm& gamma, const Point& x, const Point& y) {
  const std::string family = family_name(sc);
  if (family == "zero" || family == "constant-so3") {
    return lie::expm(gamma.eval(x, Vec(y - x))).matrix();
  }
  if (family == "constant-abelian" || family == "flux-abelian") {
    // R = exp(J int_0^1 A[y - x] dt); the line integral by Simpson.
    const int steps = 64;
    double integral = 0.0;
    for (int k = 0; k <= steps; ++k) {
      const double t = static_cast<double>(k) / steps;
      const Mat g = gamma.eval_matrix(Point((1 - t) * x + t * y), Vec(y - x));
      integral += simpson_weight(k, steps, 1.0 / steps) * g(1, 0);
    }
    return lie::expm(lie::SkewMap(Mat(integral * lie::complex_unit().matrix()))).matrix();
  }
  return std::nullopt;
}

double relative_gap(const Mat& a, const Mat& b) { return lie::op_norm(Mat(a - b)) / std::max(1.0, lie::op_norm(b)); }

}  // namespace

// ---------------------------------------------------------------- transport

void run_transport(const Scenario& sc, VerificationReport& report) {
  Context ctx(sc, report, "transport");
  const ConnectionForm gamma = connection_of(sc);

  ctx.guarded("isometry", [&] {
    double worst = 0.0;
    for (int k = 0; k < sc.draws.transport; ++k) {
      const Path path = k % 2 == 0 ? Path::segment(ctx.random_point(), ctx.random_point()) : random_curve(ctx);
      worst = std::max(worst, transport_path(gamma, path, sc.steps).ortho_defect);
    }
    ctx.at_most("isometry", worst, 1e-10, "transport stays in the orthogonal group");
  });

  ctx.guarded("colinear-loop", [&] {
    double worst = 0.0;
    std::uniform_real_distribution<double> u(-0.5, 1.5);
    for (int k = 0; k < sc.draws.transport; ++k) {
      const Point x = ctx.random_point();
      const Point y = ctx.random_point();
      const Point z = x + u(ctx.rng) * (y - x);
      const Mat loop = transport_segment(gamma, x, y, sc.steps).matrix() *
                       transport_segment(gamma, y, z, sc.steps).matrix() *
                       transport_segment(gamma, z, x, sc.steps).matrix();
      worst = std::max(worst, lie::op_norm(Mat(loop - Mat::Identity(sc.m, sc.m))));
    }
    ctx.at_most("colinear-loop", worst, 1e-9, "transport around a degenerate colinear loop is the identity");
  });

  ctx.guarded("identity-at-diagonal", [&] {
    const Point x = ctx.random_point();
    const Mat r = transport_segment(gamma, x, x, sc.steps).matrix();
    ctx.at_most("identity-at-diagonal", lie::op_norm(Mat(r - Mat::Identity(sc.m, sc.m))), 1e-14,
                "transport along a constant path is the identity");
  });

  ctx.guarded("closed-form", [&] {
    double worst = 0.0;
    bool any = false;
    for (int k = 0; k < sc.draws.transport; ++k) {
      const Point x = ctx.random_point();
      const Point y = ctx.random_point();
      const auto oracle = segment_oracle(sc, gamma, x, y);
      if (!oracle) break;
      any = true;
      worst = std::max(worst, lie::op_norm(Mat(transport_segment(gamma, x, y, sc.steps).matrix() - *oracle)));
    }
    if (any) ctx.at_most("closed-form", worst, 1e-8, "segment transport matches its closed form");
  });

  ctx.guarded("convergence-order", [&] {
    const int d = sc.n + 1;
    const Path path = Path::analytic(
        d,
        [d](double t) {
          Point x = Point::Zero(d);
          x(0) = 1.5 * std::cos(3 * M_PI * t);
          x(1) = 0.6 + 0.5 * std::sin(3 * M_PI * t);
          return x;
        },
        [d](double t) {
          Vec v = Vec::Zero(d);
          v(0) = -4.5 * M_PI * std::sin(3 * M_PI * t);
          v(1) = 1.5 * M_PI * std::cos(3 * M_PI * t);
          return v;
        },
        "loop");
    const Mat reference = transport_path(gamma, path, 4096).at_start().matrix();
    const double coarse = lie::op_norm(Mat(transport_path(gamma, path, 16).at_start().matrix() - reference));
    const double fine = lie::op_norm(Mat(transport_path(gamma, path, 64).at_start().matrix() - reference));
    ReportRow r = ctx.row("convergence-order", "fourth-order convergence of the transport integrator");
    r.lhs = coarse;
    r.rhs = fine;
    if (coarse < 1e-12) {
      r.ratio = 0.0;
      ctx.info(r);  // exact at every resolution
      return;
    }
    r.ratio = std::log(coarse / fine) / std::log(4.0);
    r.tolerance = 3.5;
    r.status = r.ratio >= 3.5 || fine < 1e-13 ? RowStatus::Pass : RowStatus::Fail;
    report.add(r);
  });

  if (!has_gauge(sc)) return;
  ctx.guarded("gauge-covariance", [&] {
    const GaugeField phi = gauge_of(sc);
    const ConnectionForm gauged = gauge_transform(gamma, phi);
    double worst_path = 0.0;
    double worst_segment = 0.0;
    double worst_difference = 0.0;
    const Field field = field_of(sc);
    const Field gauged_field = gauge_apply(phi, field);
    for (int k = 0; k < sc.draws.transport; ++k) {
      const Path path = random_curve(ctx);
      const TransportResult a = transport_path(gamma, path, sc.steps);
      const TransportResult b = transport_path(gauged, path, sc.steps);
      const Mat end_inv = phi.value(path.position(1.0)).inverse().matrix();
      for (std::size_t i = 0; i < a.samples.size(); ++i) {
        const Mat expect = phi.value(path.position(a.samples[i].t)).matrix() * a.samples[i].op.matrix() * end_inv;
        worst_path = std::max(worst_path, relative_gap(b.samples[i].op.matrix(), expect));
      }
      const Point x = ctx.random_point();
      const Point y = ctx.random_point();
      const Mat r = transport_segment(gamma, x, y, sc.steps).matrix();
      const Mat rg = transport_segment(gauged, x, y, sc.steps).matrix();
      worst_segment = std::max(worst_segment, relative_gap(Mat(rg * phi.value(y).matrix()),
                                                            Mat(phi.value(x).matrix() * r)));
      const double plain = (field.value(x) - r * field.value(y)).norm();
      const double twisted = (gauged_field.value(x) - rg * gauged_field.value(y)).norm();
      worst_difference = std::max(worst_difference, std::abs(plain - twisted) / std::max(1.0, plain));
    }
    ctx.at_most("gauge-covariance-path", worst_path, 1e-6, "transport is gauge covariant along paths");
    ctx.at_most("gauge-covariance-segment", worst_segment, 1e-6, "segment transport intertwines the gauge");
    ctx.at_most("gauge-covariance-difference", worst_difference, 1e-6,
                "transported differences are gauge invariant in norm");
  });

  ctx.guarded("ftc", [&] {
    const Field field = field_of(sc);
    double worst = 0.0;
    for (int k = 0; k < std::max(1, sc.draws.transport / 4); ++k) {
      worst = std::max(worst, ftc_reconstruct(gamma, field, random_curve(ctx), 512).defect);
    }
    ctx.at_most("ftc", worst, 1e-6, "covariant fundamental theorem of calculus along paths");
  });
}

// ---------------------------------------------------------------- curvature

void run_curvature(const Scenario& sc, VerificationReport& report) {
  Context ctx(sc, report, "curvature");
  const ConnectionForm gamma = connection_of(sc);
  const Field field = field_of(sc);
  const int d = sc.n + 1;
  double sup = 0.0;

  ctx.guarded("sup-norm", [&] {
    sup = curvature_sup_norm(gamma, ctx.region(), 64);
    if (const auto oracle = curvature_oracle(sc.connection, d, sc.m)) {
      ReportRow r = ctx.row("sup-norm", "curvature sup matches its closed form");
      r.lhs = sup;
      r.rhs = *oracle;
      r.tolerance = 1e-6;
      r.ratio = *oracle > 0 ? sup / *oracle : 0.0;
      r.status = std::abs(sup - *oracle) <= 1e-6 * std::max(1.0, *oracle) ? RowStatus::Pass : RowStatus::Fail;
      report.add(r);
    } else {
      ReportRow r = ctx.row("sup-norm", "curvature sup over the sampling region");
      r.lhs = sup;
      ctx.info(r);
    }
  });

  ctx.guarded("antisymmetry", [&] {
    double worst = 0.0;
    for (int k = 0; k < sc.draws.commutator; ++k) {
      const Point x = ctx.random_point();
      const Vec v = ctx.random_unit();
      const Vec w = ctx.random_unit();
      worst = std::max(worst, lie::op_norm(Mat(curvature(gamma, x, v, w).matrix() + curvature(gamma, x, w, v).matrix())));
    }
    ctx.at_most("antisymmetry", worst, 1e-14, "curvature is antisymmetric in its directions");
  });

  ctx.guarded("wedge-bound", [&] {
    double worst_ratio = 0.0;
    double worst_lhs = 0.0;
    double worst_rhs = 0.0;
    for (int k = 0; k < sc.draws.commutator; ++k) {
      const Point x = ctx.random_point();
      const Vec v = ctx.random_unit();
      const Vec w = 0.7 * ctx.random_unit();
      const double wedge = std::sqrt(std::max(0.0, v.squaredNorm() * w.squaredNorm() - v.dot(w) * v.dot(w)));
      const double lhs = lie::op_norm(curvature(gamma, x, v, w).matrix());
      const double rhs = sup * wedge;
      const double ratio = rhs > 0 ? lhs / rhs : (lhs > kRoundoff ? std::numeric_limits<double>::infinity() : 0.0);
      if (ratio >= worst_ratio) {
        worst_ratio = ratio;
        worst_lhs = lhs;
        worst_rhs = rhs;
      }
    }
    ctx.inequality("wedge-bound", worst_lhs, worst_rhs, kDiscretizationSlack,
                   "curvature is bounded by its sup times the wedge norm");
  });

  ctx.guarded("commutator", [&] {
    double worst = 0.0;
    for (int k = 0; k < sc.draws.commutator; ++k) {
      const Point x = ctx.random_point();
      worst = std::max(worst, commutator_defect(field, gamma, x, ctx.random_unit(), ctx.random_unit(), std::nullopt));
    }
    ctx.at_most("commutator-analytic", worst, 1e-6, "commutator of covariant derivatives equals curvature");
  });

  ctx.guarded("commutator-order", [&] {
    Point x = Point::Zero(d);
    x(0) = 0.35;
    x(d - 1) = 0.25;
    const Vec v = unit_vector(d, 0);
    const Vec w = unit_vector(d, d - 1);
    const double e1 = commutator_defect(field, gamma, x, v, w, 1e-2);
    const double e2 = commutator_defect(field, gamma, x, v, w, 5e-3);
    const double e3 = commutator_defect(field, gamma, x, v, w, 2.5e-3);
    ReportRow r = ctx.row("commutator-order", "second-order convergence of the differenced commutator");
    r.lhs = e1;
    r.rhs = e3;
    if (e3 < 1e-11) {
      ctx.info(r);  // the difference quotient is exact here
      return;
    }
    const double slope = 0.5 * (std::log2(e1 / e2) + std::log2(e2 / e3));
    r.ratio = slope;
    r.tolerance = 0.3;
    r.status = slope >= 1.7 && slope <= 2.3 ? RowStatus::Pass : RowStatus::Fail;
    report.add(r);
  });

  ctx.guarded("diamagnetic", [&] {
    const double defect = diamagnetic_defect(field, gamma, ctx.region(), sc.draws.diamagnetic, ctx.rng());
    ctx.at_most("diamagnetic", defect, 1e-6, "the norm of a field is no rougher than the field");
  });

  if (!has_gauge(sc)) return;
  ctx.guarded("gauge-laws", [&] {
    const GaugeField phi = gauge_of(sc);
    const ConnectionForm gauged = gauge_transform(gamma, phi);
    const Field gauged_field = gauge_apply(phi, field);
    double worst_d = 0.0;
    double worst_k = 0.0;
    for (int k = 0; k < sc.draws.commutator; ++k) {
      const Point x = ctx.random_point();
      const Mat q = phi.value(x).matrix();
      const Mat plain = covariant_derivative(field, gamma, x);
      const Mat twisted = covariant_derivative(gauged_field, gauged, x);
      worst_d = std::max(worst_d, (twisted - q * plain).norm() / std::max(1.0, plain.norm()));
      const Vec v = ctx.random_unit();
      const Vec w = ctx.random_unit();
      const Mat kp = curvature(gamma, x, v, w).matrix();
      const Mat kt = curvature(gauged, x, v, w).matrix();
      worst_k = std::max(worst_k, lie::op_norm(Mat(kt - q * kp * q.transpose())) / std::max(1.0, lie::op_norm(kp)));
    }
    ctx.at_most("gauge-covariant-derivative", worst_d, 1e-6, "covariant derivative is gauge covariant");
    ctx.at_most("gauge-curvature", worst_k, 1e-6, "curvature transforms by conjugation");
  });
}

// ---------------------------------------------------------------- holonomy

void run_holonomy(const Scenario& sc, VerificationReport& report) {
  Context ctx(sc, report, "holonomy");
  const ConnectionForm gamma = connection_of(sc);
  const Field field = field_of(sc);
  const int d = sc.n + 1;

  ctx.guarded("triangles", [&] {
    InequalityCheck worst;
    double worst_ratio = -1.0;
    for (int k = 0; k < sc.draws.triangles; ++k) {
      const InequalityCheck c =
          holonomy_triangle(gamma, ctx.random_point(), ctx.random_point(), ctx.random_point(), sc.steps);
      const double ratio = c.rhs > 0 ? c.lhs / c.rhs : (c.lhs > 1e-9 ? 1e300 : 0.0);
      if (ratio > worst_ratio) {
        worst_ratio = ratio;
        worst = c;
      }
    }
    ctx.inequality("triangles", worst.lhs, worst.rhs, kDiscretizationSlack,
                   "holonomy defect is bounded by curvature sup times area");
  });

  ctx.guarded("degenerate-triangle", [&] {
    const Point x = ctx.random_point();
    const Point y = ctx.random_point();
    const InequalityCheck c = holonomy_triangle(gamma, x, y, Point(0.5 * (x + y)), sc.steps);
    ctx.at_most("degenerate-triangle", c.lhs, 1e-9, "holonomy of a colinear triangle vanishes");
  });

  if (family_name(sc) == "flux-abelian") {
    ctx.guarded("stokes", [&] {
      const double b = sc.connection.value("B", 0.0);
      Point x = Point::Zero(d), y = Point::Zero(d), z = Point::Zero(d);
      y(0) = 1.0;
      z(1) = 1.0;
      const InequalityCheck c = holonomy_triangle(gamma, x, y, z, sc.steps);
      const double expected = 2.0 * std::abs(std::sin(b / 4.0));
      ReportRow r = ctx.row("stokes", "abelian holonomy equals the enclosed flux");
      r.lhs = c.lhs;
      r.rhs = expected;
      r.tolerance = 1e-6;
      r.ratio = c.rhs;
      r.status = std::abs(c.lhs - expected) <= 1e-6 && c.holds() ? RowStatus::Pass : RowStatus::Fail;
      report.add(r);
    });
  }

  ctx.guarded("two-leg", [&] {
    InequalityCheck worst;
    double worst_ratio = -1.0;
    for (int k = 0; k < sc.draws.triangles; ++k) {
      const InequalityCheck c = triangle_difference_bound(gamma, field, ctx.random_point(), ctx.random_point(),
                                                          ctx.random_point(), sc.steps);
      const double ratio = c.rhs > 0 ? c.lhs / c.rhs : (c.lhs > 1e-9 ? 1e300 : 0.0);
      if (ratio > worst_ratio) {
        worst_ratio = ratio;
        worst = c;
      }
    }
    ctx.inequality("two-leg", worst.lhs, worst.rhs, kDiscretizationSlack,
                   "transported difference is bounded through a third point");
  });

  ctx.guarded("parameter-derivative", [&] {
    ParameterDerivative worst;
    double worst_ratio = -1.0;
    double worst_identity = 0.0;
    for (int k = 0; k < sc.draws.homotopies; ++k) {
      const Point x0 = ctx.random_point();
      const Point y0 = ctx.random_point();
      const Vec a = 0.5 * ctx.random_unit();
      const Vec b = 0.5 * ctx.random_unit();
      const Vec c = 0.4 * ctx.random_unit();
      const Homotopy hom = Homotopy::make(
          d,
          [=](double t, double s) {
            return Point((1 - t) * (x0 + s * a) + t * (y0 + s * b) + s * std::sin(M_PI * t) * c);
          },
          0.0, 1.0,
          [=](double t, double s) {
            return Vec((y0 + s * b) - (x0 + s * a) + s * M_PI * std::cos(M_PI * t) * c);
          },
          [=](double t, double) { return Vec((1 - t) * a + t * b + std::sin(M_PI * t) * c); });
      const ParameterDerivative pd = transport_parameter_derivative(gamma, hom, 0.5, sc.steps);
      const double lhs = lie::op_norm(pd.lhs);
      const double ratio = pd.bound > 0 ? lhs / pd.bound : (lhs > 1e-9 ? 1e300 : 0.0);
      worst_identity = std::max(worst_identity, lie::op_norm(Mat(pd.lhs - pd.rhs)));
      if (ratio > worst_ratio) {
        worst_ratio = ratio;
        worst = pd;
      }
    }
    ctx.inequality("parameter-derivative", lie::op_norm(worst.lhs), worst.bound, kDiscretizationSlack,
                   "derivative of transport in a parameter is bounded by the swept curvature");
    ctx.at_most("parameter-identity", worst_identity, 1e-6,
                "derivative of transport in a parameter equals the curvature integral");
  });

  ctx.guarded("colinear-homotopy", [&] {
    double worst = 0.0;
    for (int k = 0; k < std::max(1, sc.draws.homotopies / 2); ++k) {
      const Point x = ctx.random_point();
      const Vec dir = ctx.random_unit();
      const Homotopy hom = Homotopy::make(
          d, [=](double t, double s) { return Point(x + t * (1.0 + s) * dir); }, 0.0, 1.0,
          [=](double, double s) { return Vec((1.0 + s) * dir); }, [=](double t, double) { return Vec(t * dir); });
      worst = std::max(worst, lie::op_norm(transport_parameter_derivative(gamma, hom, 0.5, sc.steps).lhs));
    }
    ctx.at_most("colinear-homotopy", worst, 1e-6, "sliding an endpoint along its own line leaves no defect");
  });
}

// ---------------------------------------------------------------- seminorm

void run_seminorm(const Scenario& sc, VerificationReport& report) {
  Context ctx(sc, report, "seminorm");
  const ConnectionForm gamma = connection_of(sc);
  const ConnectionForm boundary_gamma = restrict_to_boundary(gamma);
  const Field u = trace(field_of(sc));

  for (double p : sc.p_values) {
    const double s = sc.s_for(p);
    const GagliardoParams params(sc.n, s, p);
    std::vector<SeminormResult> series;
    ctx.guarded("refinement", [&] {
      for (int cells : sc.lateral_levels()) {
        QuadratureSpec q = sc.quadrature;
        q.lateral_cells = cells;
        const SeminormResult r = gagliardo_seminorm(u, boundary_gamma, params, q, sc.steps);
        series.push_back(r);
        ReportRow row = ctx.row("seminorm", "gauge-covariant fractional seminorm (p-th power)");
        row.s = s;
        row.p = p;
        row.grid = cells;
        row.lhs = r.power;
        row.rhs = r.residual_bound;
        row.ratio = r.power > 0 ? r.residual_bound / r.power : 0.0;
        ctx.info(row);
      }
      if (series.size() >= 2) {
        ReportRow row = ctx.row("refinement-residual", "refinement change is within the excluded-shell residual");
        row.s = s;
        row.p = p;
        row.grid = series.back().grid;
        row.lhs = std::abs(series.back().power - series.front().power);
        row.rhs = series.front().residual_bound;
        row.tolerance = kDiscretizationSlack;
        row.ratio = row.rhs > 0 ? row.lhs / row.rhs : 0.0;
        row.status = row.lhs <= row.rhs * (1 + kDiscretizationSlack) + kRoundoff ? RowStatus::Pass : RowStatus::Fail;
        report.add(row);
      }
    });

    QuadratureSpec q = sc.quadrature;
    ctx.guarded("scaling", [&] {
      const double base = gagliardo_seminorm(u, boundary_gamma, params, q, sc.steps).power;
      const double scaled = gagliardo_seminorm(u.scaled(-2.5), boundary_gamma, params, q, sc.steps).power;
      const double expect = std::pow(2.5, p) * base;
      ctx.at_most("scaling", std::abs(scaled - expect) / std::max(1e-300, expect), 1e-12,
                  "seminorm is absolutely homogeneous");
    });

    ctx.guarded("exclusion-monotone", [&] {
      QuadratureSpec wide = q;
      wide.exclusion_radius = q.exclusion_radius + 1;
      const double narrow_value = gagliardo_seminorm(u, boundary_gamma, params, q, sc.steps).power;
      const double wide_value = gagliardo_seminorm(u, boundary_gamma, params, wide, sc.steps).power;
      ctx.inequality("exclusion-monotone", wide_value, narrow_value, 0.0,
                     "seminorm estimate grows as the excluded diagonal shrinks");
    });

    if (has_gauge(sc)) {
      ctx.guarded("gauge-invariance", [&] {
        const GaugeField phi = gauge_of(sc);
        const GaugeField phi_boundary = phi.restrict_to_boundary();
        const ConnectionForm gauged = restrict_to_boundary(gauge_transform(gamma, phi));
        const double plain = gagliardo_seminorm(u, boundary_gamma, params, q, sc.steps).power;
        const double twisted = gagliardo_seminorm(gauge_apply(phi_boundary, u), gauged, params, q, sc.steps).power;
        ReportRow r = ctx.row("gauge-invariance", "seminorm is gauge invariant");
        r.s = s;
        r.p = p;
        r.grid = q.lateral_cells;
        r.lhs = twisted;
        r.rhs = plain;
        r.tolerance = 1e-6;
        r.ratio = std::abs(twisted - plain) / std::max(1e-300, plain);
        r.status = r.ratio <= 1e-6 ? RowStatus::Pass : RowStatus::Fail;
        report.add(r);
      });
    }
  }
}

// ------------------------------------------------------ trace/extension

namespace {

void stability_row(Context& ctx, const std::string& check, const std::vector<InequalityReport>& series, double s,
                   double p, double beta) {
  if (series.size() < 2) return;
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  bool finite = true;
  for (const auto& r : series) {
    finite = finite && std::isfinite(r.ratio);
    lo = std::min(lo, r.ratio);
    hi = std::max(hi, r.ratio);
  }
  ReportRow row = ctx.row(check + "-stability", "inequality ratio is stable under lateral refinement");
  row.s = s;
  row.p = p;
  row.beta = beta;
  row.grid = series.back().grid;
  row.lhs = hi;
  row.rhs = lo;
  row.tolerance = 0.10;
  row.ratio = lo > 0 ? hi / lo - 1.0 : 0.0;
  row.status = finite && row.ratio <= 0.10 ? RowStatus::Pass : RowStatus::Fail;
  ctx.report.add(row);
}

void report_row(Context& ctx, const InequalityReport& r, double s, double p, double beta, const std::string& property) {
  ReportRow row = ctx.row(r.name, property);
  row.s = s;
  row.p = p;
  row.beta = beta;
  row.grid = r.grid;
  row.lhs = r.lhs;
  row.rhs = r.rhs;
  row.ratio = r.ratio;
  row.status = std::isfinite(r.ratio) && r.rhs >= 0.0 ? RowStatus::Info : RowStatus::Fail;
  ctx.report.add(row);
}

}  // namespace

void run_trace_check(const Scenario& sc, VerificationReport& report) {
  Context ctx(sc, report, "trace-check");
  const ConnectionForm gamma = connection_of(sc);
  const Field field = field_of(sc);
  for (double p : sc.p_values) {
    const double s = sc.s_for(p);
    ctx.guarded("trace-reports", [&] {
      std::vector<InequalityReport> first;
      std::vector<InequalityReport> second;
      double beta = 0.0;
      for (int cells : sc.lateral_levels()) {
        QuadratureSpec q = sc.quadrature;
        q.lateral_cells = cells;
        beta = beta_for(sc, gamma, q);
        const auto [a, b] = trace_inequality_report(field, gamma, s, p, beta, q, sc.steps);
        report_row(ctx, a, s, p, beta, "trace seminorm against the weighted bulk energy");
        report_row(ctx, b, s, p, beta, "trace mass against the interpolated bulk energies");
        first.push_back(a);
        second.push_back(b);
      }
      stability_row(ctx, "trace-seminorm", first, s, p, beta);
      stability_row(ctx, "trace-lp", second, s, p, beta);
    });

    ctx.guarded("energy-gauge-invariance", [&] {
      if (!has_gauge(sc)) return;
      const GaugeField phi = gauge_of(sc);
      const ConnectionForm gauged = gauge_transform(gamma, phi);
      const double beta = beta_for(sc, gamma, sc.quadrature);
      const auto plain = trace_inequality_report(field, gamma, s, p, beta, sc.quadrature, sc.steps);
      const auto twisted = trace_inequality_report(gauge_apply(phi, field), gauged, s, p, beta, sc.quadrature, sc.steps);
      const double gap = std::max(std::abs(plain.first.ratio - twisted.first.ratio) / plain.first.ratio,
                                  std::abs(plain.second.ratio - twisted.second.ratio) / plain.second.ratio);
      ctx.at_most("trace-gauge-invariance", gap, 1e-4, "trace inequality ratios are gauge invariant");
    });
  }
}

void run_extend_check(const Scenario& sc, VerificationReport& report) {
  Context ctx(sc, report, "extend-check");
  const ConnectionForm gamma = connection_of(sc);
  const Field u = trace(field_of(sc));
  const QuadratureSpec& q0 = sc.quadrature;
  const double beta0 = beta_for(sc, gamma, q0);
  ExtensionConfig cfg;
  cfg.beta = beta0;
  cfg.grid = q0;
  cfg.steps = sc.steps;

  ctx.guarded("linearity", [&] {
    json other = sc.field;
    Vec centre = Vec::Zero(sc.n + 1);
    centre(0) = 0.3;
    other["centre"] = std::vector<double>(centre.data(), centre.data() + centre.size());
    other["twist"] = -0.7;
    other["radius"] = 0.5 * other.value("radius", 1.5);
    other["width"] = 0.5 * other.value("width", 0.6);
    const Field u2 = trace(make_field(other, sc.n + 1, sc.m));
    const Field e1 = extend(u, gamma, cfg);
    const Field e2 = extend(u2, gamma, cfg);
    const Field e12 = extend(u.combine(1.0, u2, 2.0), gamma, cfg);
    double gap = 0.0;
    double scale = 0.0;
    for (std::size_t i = 0; i < e1.node_values().size(); ++i) {
      gap = std::max(gap, std::abs(e12.node_values()[i] - e1.node_values()[i] - 2.0 * e2.node_values()[i]));
      scale = std::max(scale, std::abs(e12.node_values()[i]));
    }
    ctx.at_most("linearity", gap / std::max(1e-300, scale), 1e-12, "extension is linear in the boundary data");
  });

  ctx.guarded("round-trip", [&] {
    const Field back = trace(extend(u, gamma, cfg));
    double worst = 0.0;
    for (std::size_t node = 0; node < back.grid().node_count(); ++node) {
      worst = std::max(worst, (back.node_value(node) - u.value(back.grid().node(node))).norm());
    }
    ctx.at_most("round-trip", worst, 1e-8, "trace of the extension reproduces the boundary data");
  });

  ctx.guarded("attainment-order", [&] {
    std::vector<double> errors;
    std::vector<double> first_heights;
    for (int cells : {16, 32, 64}) {
      ExtensionConfig c = cfg;
      c.grid.vertical_cells = cells;
      errors.push_back(first_layer_attainment(extend(u, gamma, c), u));
      first_heights.push_back(graded_nodes(c.grid.height, cells, c.grid.grading)[1]);
    }
    const double order = std::log(errors[1] / errors[2]) / std::log(first_heights[1] / first_heights[2]);
    ReportRow r = ctx.row("attainment-order", "extension attains the boundary data continuously");
    r.lhs = errors.front();
    r.rhs = errors.back();
    r.ratio = order;
    r.tolerance = 1.0;
    r.status = (order >= 1.0 - 1e-9 && errors.back() < errors.front()) || errors.back() < 1e-13 ? RowStatus::Pass
                                                                                              : RowStatus::Fail;
    report.add(r);
  });

  for (double p : sc.p_values) {
    const double s = sc.s_for(p);
    ctx.guarded("extension-reports", [&] {
      std::vector<InequalityReport> first;
      std::vector<InequalityReport> second;
      double beta = 0.0;
      for (int cells : sc.lateral_levels()) {
        QuadratureSpec q = sc.quadrature;
        q.lateral_cells = cells;
        beta = beta_for(sc, gamma, q);
        const auto [a, b] = extension_inequality_report(u, gamma, s, p, beta, q, sc.steps);
        report_row(ctx, a, s, p, beta, "extension energy against boundary seminorm and mass");
        report_row(ctx, b, s, p, beta, "extension mass against damped boundary mass");
        first.push_back(a);
        second.push_back(b);
      }
      stability_row(ctx, "extension-gradient", first, s, p, beta);
      stability_row(ctx, "extension-mass", second, s, p, beta);
    });
  }

  if (!has_gauge(sc)) return;
  ctx.guarded("gauge-equivariance", [&] {
    const GaugeField phi = gauge_of(sc);
    const ConnectionForm gauged = gauge_transform(gamma, phi);
    const Field plain = extend(u, gamma, cfg);
    const Field twisted = extend(gauge_apply(phi.restrict_to_boundary(), u), gauged, cfg);
    double gap = 0.0;
    double scale = 0.0;
    for (std::size_t node = 0; node < plain.grid().node_count(); ++node) {
      const FiberVec expect = phi.value(plain.grid().node(node)).apply(plain.node_value(node));
      gap = std::max(gap, (twisted.node_value(node) - expect).norm());
      scale = std::max(scale, expect.norm());
    }
    ctx.at_most("gauge-equivariance", gap / std::max(1e-300, scale), 1e-6, "extension commutes with gauges");
  });
}

// ---------------------------------------------------------------- pullback

void run_pullback_check(const Scenario& sc, VerificationReport& report) {
  Context ctx(sc, report, "pullback-check");
  const ConnectionForm gamma = connection_of(sc);
  const Field field = field_of(sc);
  const int d = sc.n + 1;
  Mat rotation = Mat::Identity(d, d);
  rotation(0, 0) = std::cos(0.4);
  rotation(0, 1) = -std::sin(0.4);
  rotation(1, 0) = std::sin(0.4);
  rotation(1, 1) = std::cos(0.4);
  const std::vector<Chart> charts = {Chart::identity(d), Chart::dilation(d, 1.5), Chart::linear(rotation, "rotation"),
                                     Chart::shear(d, 0.2)};
  for (const Chart& psi : charts) {
    ctx.guarded("pullback-" + psi.name(), [&] {
      const ConnectionForm pulled = pullback(gamma, psi);
      const Field composed = compose(field, psi);
      double worst = 0.0;
      for (int k = 0; k < sc.draws.pullback; ++k) {
        const Point x = ctx.random_point();
        const Mat lhs = covariant_derivative(composed, pulled, x);
        const Mat rhs = pullback_covariant_derivative(field, gamma, psi, x);
        worst = std::max(worst, (lhs - rhs).norm());
      }
      ctx.at_most("pullback-" + psi.name(), worst, 1e-6, "covariant derivative commutes with pullback by charts");
    });
  }
}

void run_suite(const Scenario& sc, VerificationReport& report) {
  run_transport(sc, report);
  run_curvature(sc, report);
  run_holonomy(sc, report);
  run_seminorm(sc, report);
  run_trace_check(sc, report);
  run_extend_check(sc, report);
  run_pullback_check(sc, report);
}

// --------------------------------------------------------------------- main

namespace {

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Numerical checks for gauge-covariant transport, seminorms, traces and extensions"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir = "gaugetrace-out";
  std::uint64_t seed = 0;
  int refine = 0;
  bool dump = false;

  const std::vector<std::pair<std::string, std::function<void(const Scenario&, VerificationReport&)>>> commands = {
      {"transport", run_transport},       {"curvature", run_curvature},         {"holonomy", run_holonomy},
      {"seminorm", run_seminorm},         {"trace-check", run_trace_check},     {"extend-check", run_extend_check},
      {"pullback-check", run_pullback_check}, {"suite", run_suite}};
  for (const auto& [name, fn] : commands) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "scenario file (JSON)")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "override the scenario seed");
    sub->add_option("--refine", refine, "number of lateral refinement levels")->check(CLI::PositiveNumber);
    sub->add_flag("--dump", dump, "also write the extended field of the scenario as a grid dump");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const CLI::App* chosen = app.get_subcommands().front();
  const std::string name = chosen->get_name();
  try {
    Scenario sc = load_scenario(config_path);
    if (chosen->count("--seed") > 0) sc.seed = seed;
    if (chosen->count("--refine") > 0) sc.refine = refine;
    if (!sc.seed) fail(ErrorKind::ConfigError, "field 'seed': required (set it in the config or pass --seed)");

    VerificationReport report;
    report.set_metadata("tool", "gaugetrace");
    report.set_metadata("subcommand", name);
    report.set_metadata("config", config_path);
    report.set_metadata("seed", *sc.seed);
    report.set_metadata("refine", sc.refine);
    report.set_metadata("timestamp", utc_timestamp());
    for (const auto& [cmd, fn] : commands) {
      if (cmd == name) fn(sc, report);
    }
    if (dump) {
      ExtensionConfig cfg;
      const ConnectionForm gamma = connection_of(sc);
      cfg.beta = beta_for(sc, gamma, sc.quadrature);
      cfg.grid = sc.quadrature;
      cfg.steps = sc.steps;
      std::filesystem::create_directories(out_dir);
      write_field((std::filesystem::path(out_dir) / "extension.bin").string(),
                  extend(trace(field_of(sc)), gamma, cfg));
    }
    report.write(out_dir);
    for (const auto& row : report.rows()) {
      if (row.status == RowStatus::Fail || row.status == RowStatus::Error) {
        std::cerr << "FAIL " << row.suite << '/' << row.check << ": " << row.property << " (lhs "
                  << format_number(row.lhs) << ", rhs " << format_number(row.rhs) << ")\n";
      }
    }
    std::cout << name << ": " << report.rows().size() << " rows, " << report.failures() << " failures; wrote "
              << out_dir << "/report.{json,csv}\n";
    return report.passed() ? 0 : 1;
  } catch (const Error& e) {
    std::cerr << e.what() << '\n';
    return e.kind() == ErrorKind::ConfigError ? 2 : 1;
  }
}

}  // namespace gaugetrace::cli
