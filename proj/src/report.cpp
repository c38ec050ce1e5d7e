#include "sfk/report.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "sfk/errors.hpp"

namespace sfk {

using nlohmann::json;

std::string to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::skipped: return "skipped";
  }
  return "unknown";
}

CheckStatus check_status_from(const std::string& s) {
  if (s == "pass") return CheckStatus::pass;
  if (s == "fail") return CheckStatus::fail;
  if (s == "skipped") return CheckStatus::skipped;
  throw ConfigError("unknown check status " + s);
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json CheckResult::to_json() const {
  json j;
  j["name"] = name;
  j["status"] = to_string(status);
  j["measured"] = measured;
  j["tolerance"] = tolerance;
  if (!note.empty()) j["note"] = note;
  return j;
}

CheckResult CheckResult::from_json(const json& j) {
  CheckResult r;
  r.name = j.at("name").get<std::string>();
  r.status = check_status_from(j.at("status").get<std::string>());
  r.measured = j.at("measured");
  r.tolerance = j.at("tolerance");
  if (j.contains("note")) r.note = j["note"].get<std::string>();
  return r;
}

bool RunReport::all_passed() const { return count(CheckStatus::fail) == 0; }

std::size_t RunReport::count(CheckStatus s) const {
  std::size_t n = 0;
  for (const auto& c : checks) n += c.status == s;
  return n;
}

const CheckResult* RunReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

json RunReport::to_json() const {
  json j;
  j["schema"] = kReportSchema;
  j["scenario"] = scenario;
  j["beta"] = beta;
  j["provenance"] = {{"config_hash", config_hash}, {"code_version", code_version}, {"seed", seed},
                     {"tol_scale", tol_scale}};
  j["summary"] = {{"checks", checks.size()},
                  {"passed", count(CheckStatus::pass)},
                  {"failed", count(CheckStatus::fail)},
                  {"skipped", count(CheckStatus::skipped)},
                  {"all_passed", all_passed()}};
  j["checks"] = json::array();
  for (const auto& c : checks) j["checks"].push_back(c.to_json());
  return j;
}

json RunReport::timings_json() const {
  json j = json::object();
  for (const auto& [k, v] : timings) j[k] = v;
  return j;
}

std::string RunReport::dump() const { return to_json().dump(2) + "\n"; }

void RunReport::write(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "report.json") << dump();
  std::ofstream(dir / "timings.json") << timings_json().dump(2) << "\n";
}

std::vector<std::string> validate_report(const json& j) {
  std::vector<std::string> errs;
  const auto need = [&](const json& o, const char* key, auto pred, const std::string& where) {
    if (!o.is_object() || !o.contains(key)) {
      errs.push_back(where + key + ": missing");
      return false;
    }
    if (!pred(o[key])) {
      errs.push_back(where + key + ": wrong type");
      return false;
    }
    return true;
  };
  const auto is_string = [](const json& v) { return v.is_string(); };
  const auto is_object = [](const json& v) { return v.is_object(); };
  const auto is_count = [](const json& v) { return v.is_number_unsigned(); };
  if (!j.is_object()) return {"report is not an object"};
  if (need(j, "schema", is_string, "") && j["schema"] != kReportSchema) errs.push_back("schema: unexpected value");
  need(j, "scenario", is_string, "");
  need(j, "beta", is_string, "");
  if (need(j, "provenance", is_object, "")) {
    need(j["provenance"], "config_hash", is_string, "provenance.");
    need(j["provenance"], "code_version", is_string, "provenance.");
    need(j["provenance"], "seed", is_count, "provenance.");
    need(j["provenance"], "tol_scale", [](const json& v) { return v.is_number(); }, "provenance.");
  }
  if (need(j, "summary", is_object, "")) {
    for (const char* k : {"checks", "passed", "failed", "skipped"}) need(j["summary"], k, is_count, "summary.");
    need(j["summary"], "all_passed", [](const json& v) { return v.is_boolean(); }, "summary.");
  }
  if (need(j, "checks", [](const json& v) { return v.is_array(); }, "")) {
    std::set<std::string> names;
    std::size_t pass = 0, fail = 0, skip = 0;
    for (std::size_t i = 0; i < j["checks"].size(); ++i) {
      const json& c = j["checks"][i];
      const std::string where = "checks[" + std::to_string(i) + "].";
      if (need(c, "name", is_string, where) && !names.insert(c["name"].get<std::string>()).second)
        errs.push_back(where + "name: duplicate check " + c["name"].get<std::string>());
      if (need(c, "status", is_string, where)) {
        const std::string s = c["status"];
        if (s == "pass") ++pass;
        else if (s == "fail") ++fail;
        else if (s == "skipped") ++skip;
        else errs.push_back(where + "status: unknown value " + s);
      }
      need(c, "measured", is_object, where);
      need(c, "tolerance", is_object, where);
      for (auto it = c.begin(); it != c.end(); ++it)
        if (it.key() != "name" && it.key() != "status" && it.key() != "measured" && it.key() != "tolerance" &&
            it.key() != "note")
          errs.push_back(where + it.key() + ": unknown key");
    }
    if (j.contains("summary") && j["summary"].is_object() && errs.empty()) {
      const json& s = j["summary"];
      if (s["checks"] != j["checks"].size() || s["passed"] != pass || s["failed"] != fail || s["skipped"] != skip ||
          s["all_passed"] != (fail == 0))
        errs.push_back("summary: counts do not match the checks");
    }
  }
  return errs;
}

}  // namespace sfk
