#include "gaugetrace/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gaugetrace/error.hpp"

namespace gaugetrace {

std::string to_string(RowStatus status) {
  switch (status) {
    case RowStatus::Pass:
      return "pass";
    case RowStatus::Fail:
      return "fail";
    case RowStatus::Info:
      return "info";
    case RowStatus::Error:
      return "error";
  }
  return "unknown";
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool VerificationReport::passed() const { return failures() == 0; }

std::size_t VerificationReport::failures() const {
  std::size_t count = 0;
  for (const auto& r : rows_) {
    if (r.status == RowStatus::Fail || r.status == RowStatus::Error) ++count;
  }
  return count;
}

namespace {

nlohmann::json number_json(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

nlohmann::json VerificationReport::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : rows_) {
    rows.push_back({{"suite", r.suite},
                    {"check", r.check},
                    {"n", r.n},
                    {"m", r.m},
                    {"s", number_json(r.s)},
                    {"p", number_json(r.p)},
                    {"beta", number_json(r.beta)},
                    {"grid", r.grid},
                    {"lhs", number_json(r.lhs)},
                    {"rhs", number_json(r.rhs)},
                    {"ratio", number_json(r.ratio)},
                    {"tolerance", number_json(r.tolerance)},
                    {"status", to_string(r.status)},
                    {"property", r.property}});
  }
  return {{"schema_version", kReportSchemaVersion},
          {"metadata", metadata_},
          {"passed", passed()},
          {"failures", failures()},
          {"rows", rows}};
}

std::string VerificationReport::to_csv() const {
  std::ostringstream out;
  out << "# " << metadata_.dump() << '\n';
  out << "suite,check,n,m,s,p,beta,grid,lhs,rhs,ratio,tolerance,status,property\n";
  for (const auto& r : rows_) {
    out << csv_escape(r.suite) << ',' << csv_escape(r.check) << ',' << r.n << ',' << r.m << ','
        << format_number(r.s) << ',' << format_number(r.p) << ',' << format_number(r.beta) << ',' << r.grid << ','
        << format_number(r.lhs) << ',' << format_number(r.rhs) << ',' << format_number(r.ratio) << ','
        << format_number(r.tolerance) << ',' << to_string(r.status) << ',' << csv_escape(r.property) << '\n';
  }
  return out.str();
}

void VerificationReport::write(const std::string& directory) const {
  std::error_code ec;
  std::filesystem::create_directories(directory, ec);
  if (ec) fail(ErrorKind::IoError, "cannot create output directory '" + directory + "': " + ec.message());
  const auto base = std::filesystem::path(directory);
  {
    std::ofstream json_out(base / "report.json");
    if (!json_out) fail(ErrorKind::IoError, "cannot write report.json in '" + directory + "'");
    json_out << to_json().dump(2) << '\n';
  }
  {
    std::ofstream csv_out(base / "report.csv");
    if (!csv_out) fail(ErrorKind::IoError, "cannot write report.csv in '" + directory + "'");
    csv_out << to_csv();
  }
}

}  // namespace gaugetrace
