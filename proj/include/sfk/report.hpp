#pragma once

// Verification reports. A report is a JSON document (docs/report_schema.md)
// holding one entry per enabled check; wall-clock timings are kept apart so
// that the report itself is reproducible byte for byte.

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace sfk {

inline constexpr const char* kReportSchema = "sfk-report/1";

enum class CheckStatus { pass, fail, skipped };

std::string to_string(CheckStatus s);
CheckStatus check_status_from(const std::string& s);

struct CheckResult {
  std::string name;
  CheckStatus status = CheckStatus::skipped;
  nlohmann::json measured = nlohmann::json::object();
  nlohmann::json tolerance = nlohmann::json::object();
  std::string note;

  nlohmann::json to_json() const;
  static CheckResult from_json(const nlohmann::json& j);
};

struct RunReport {
  std::string scenario;
  std::string beta;
  std::string config_hash;
  std::string code_version;
  std::uint64_t seed = 0;
  double tol_scale = 1.0;
  std::vector<CheckResult> checks;
  std::vector<std::pair<std::string, double>> timings;  // seconds per check

  bool all_passed() const;  // skipped checks do not fail a run
  std::size_t count(CheckStatus s) const;
  const CheckResult* find(const std::string& name) const;

  nlohmann::json to_json() const;
  nlohmann::json timings_json() const;
  // Two-space indented, sorted keys, trailing newline.
  std::string dump() const;
  // Writes report.json and timings.json into `dir`.
  void write(const std::filesystem::path& dir) const;
};

// Structural validation against the report schema; empty when valid.
std::vector<std::string> validate_report(const nlohmann::json& j);

// Replaces non-finite numbers by null, which JSON cannot hold otherwise.
nlohmann::json finite_or_null(double v);

}  // namespace sfk
