#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace gaugetrace {

inline constexpr int kReportSchemaVersion = 1;

enum class RowStatus { Pass, Fail, Info, Error };

std::string to_string(RowStatus status);

/// One verified quantity. `property` names the checked law in words.
struct ReportRow {
  std::string suite;
  std::string check;
  int n = 0;
  int m = 0;
  double s = 0.0;
  double p = 0.0;
  double beta = 0.0;
  int grid = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  double tolerance = 0.0;
  RowStatus status = RowStatus::Info;
  std::string property;
};

class VerificationReport {
 public:
  void add(ReportRow row) { rows_.push_back(std::move(row)); }
  const std::vector<ReportRow>& rows() const { return rows_; }
  bool passed() const;
  std::size_t failures() const;

  void set_metadata(const std::string& key, const nlohmann::json& value) { metadata_[key] = value; }
  const nlohmann::json& metadata() const { return metadata_; }

  nlohmann::json to_json() const;
  /// First line: `# ` + metadata JSON. Every other line is deterministic.
  std::string to_csv() const;
  void write(const std::string& directory) const;

 private:
  std::vector<ReportRow> rows_;
  nlohmann::json metadata_ = nlohmann::json::object();
};

/// %.17g formatting, with inf / nan spelled out.
std::string format_number(double v);

}  // namespace gaugetrace
