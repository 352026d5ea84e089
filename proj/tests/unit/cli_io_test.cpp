#include <gtest/gtest.h>

#include <filesystem>

#include "gaugetrace/cli.hpp"
#include "gaugetrace/error.hpp"
#include "gaugetrace/io.hpp"
#include "gaugetrace/registry.hpp"

using namespace gaugetrace;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::IoError;
}

std::string csv_body(const VerificationReport& r) {
  const std::string csv = r.to_csv();
  return csv.substr(csv.find('\n') + 1);
}

}  // namespace

TEST(Config, MissingFiberDimensionNamesTheField) {
  try {
    cli::parse_scenario(R"({"n": 1, "connection": {"family": "zero"}})", "inline");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ConfigError);
    EXPECT_NE(std::string(e.what()).find("'m'"), std::string::npos);
  }
}

TEST(Config, SyntaxErrorsReportTheLine) {
  try {
    cli::parse_scenario("{\n  \"n\": 1,\n  \"m\": ,\n}", "inline");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(Config, PresetValuesCanBeOverridden) {
  const cli::Scenario sc =
      cli::parse_scenario(R"({"preset": "abelian-n1", "connection": {"B": 2.0}, "analysis": {"p": 4}})", "inline");
  EXPECT_EQ(sc.connection.value("B", 0.0), 2.0);
  EXPECT_EQ(sc.connection.value("family", std::string()), "flux-abelian");
  ASSERT_EQ(sc.p_values.size(), 1u);
  EXPECT_DOUBLE_EQ(sc.s_for(4.0), 0.75);
  EXPECT_EQ(sc.lateral_levels(), (std::vector<int>{32, 48, 64}));
}

TEST(Config, UnknownFamiliesAndBadValuesAreConfigErrors) {
  EXPECT_EQ(kind_of([] { cli::parse_scenario(R"({"n":1,"m":2,"connection":{"family":"nope"}})", "x"); }),
            ErrorKind::ConfigError);
  EXPECT_EQ(kind_of([] { cli::parse_scenario(R"({"preset":"abelian-n1","analysis":{"p":0.5}})", "x"); }),
            ErrorKind::ConfigError);
  EXPECT_EQ(kind_of([] { cli::parse_scenario(R"({"preset":"abelian-n1","steps":7})", "x"); }),
            ErrorKind::ConfigError);
  EXPECT_EQ(kind_of([] { cli::parse_scenario(R"({"preset":"abelian-n1","m":3})", "x"); }), ErrorKind::ConfigError);
}

TEST(Report, CsvBodyIsDeterministicAcrossRuns) {
  const cli::Scenario sc = cli::parse_scenario(R"({"preset": "abelian-n1"})", "inline");
  VerificationReport a, b;
  a.set_metadata("timestamp", "one");
  b.set_metadata("timestamp", "two");
  cli::run_holonomy(sc, a);
  cli::run_holonomy(sc, b);
  EXPECT_EQ(csv_body(a), csv_body(b));
  EXPECT_NE(a.to_csv(), b.to_csv());
  EXPECT_TRUE(a.passed());
  EXPECT_EQ(a.to_json()["schema_version"], kReportSchemaVersion);
}

TEST(Report, NonFiniteValuesAreSpelledOut) {
  VerificationReport r;
  ReportRow row;
  row.rhs = std::numeric_limits<double>::infinity();
  row.status = RowStatus::Fail;
  r.add(row);
  EXPECT_EQ(r.to_json()["rows"][0]["rhs"], "inf");
  EXPECT_FALSE(r.passed());
  EXPECT_EQ(format_number(0.1), "0.10000000000000001");
}

TEST(Io, FieldDumpRoundTrips) {
  const RectilinearGrid grid({{-1.0, 0.0, 2.0}, {0.0, 0.25, 1.0, 3.0}});
  std::vector<double> values(grid.node_count() * 2);
  for (std::size_t k = 0; k < values.size(); ++k) values[k] = std::sin(1.0 + k) / 3.0;
  const auto path = std::filesystem::temp_directory_path() / "gaugetrace_field_roundtrip.bin";
  write_field(path.string(), Field::sampled(grid, 2, values));
  const Field back = read_field(path.string());
  EXPECT_EQ(back.node_values(), values);
  EXPECT_EQ(back.grid().axis(1), grid.axis(1));
  std::filesystem::remove(path);
  EXPECT_EQ(kind_of([] { read_field("/nonexistent/field.bin"); }), ErrorKind::IoError);
}

TEST(Io, ConnectionDumpRoundTrips) {
  const ConnectionForm g = make_connection({{"family", "flux-abelian"}, {"B", 0.8}}, 2, 2);
  const RectilinearGrid grid({{-1.0, 0.0, 1.0}, {0.0, 1.0}});
  const auto path = std::filesystem::temp_directory_path() / "gaugetrace_connection_roundtrip.bin";
  write_connection(path.string(), grid, 2, sample_connection(g, grid));
  const ConnectionForm back = read_connection(path.string());
  Point x(2);
  x << 0.3, 0.6;
  EXPECT_LT((back.eval_matrix(x, unit_vector(2, 0)) - g.eval_matrix(x, unit_vector(2, 0))).norm(), 1e-15);
  std::filesystem::remove(path);
}
