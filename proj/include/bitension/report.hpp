#pragma once

// Verification reports: per-check records, overall verdict, JSON and text
// renderings. Both renderings print numbers through the same shortest
// round-trip formatting, so they carry identical digits.

#include <chrono>
#include <cstdint>
#include <ctime>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bitension/geometry.hpp"

namespace bitension {

inline constexpr const char* kVersion = "0.1.0";

enum class Verdict { Zero, Nonzero };

inline const char* verdict_name(Verdict v) { return v == Verdict::Zero ? "zero" : "nonzero"; }

/// One check over all sample points. For a "zero" check max_abs is the
/// largest residual and must not exceed tol; for a "nonzero" check max_abs is
/// the smallest magnitude seen and must exceed tol. max_norm divides each
/// residual by |tau|_h + 1 at its point. worst_point is where max_abs occurred.
struct CheckRecord {
  std::string name;
  Verdict kind = Verdict::Zero;
  double max_abs = 0.0;
  double max_norm = 0.0;
  double tol = 0.0;
  bool pass = false;
  Point worst_point;
  std::string error;  // evaluation failure, empty when none
};

struct VerificationReport {
  std::string version = kVersion;
  std::string case_name;
  std::uint64_t seed = 0;
  int samples = 0;
  std::map<std::string, double> params;
  std::vector<CheckRecord> checks;
  std::string verdict;  // optional classification, e.g. "proper biharmonic"
  bool pass = false;

  void finalize() {
    pass = !checks.empty();
    for (const auto& c : checks) pass = pass && c.pass;
  }
  bool evaluation_failed() const {
    for (const auto& c : checks)
      if (!c.error.empty()) return true;
    return false;
  }
};

inline std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Schema: { version, case, seed, samples, params, checks: [{name, kind,
/// max_abs, max_norm, tol, pass, worst_point, error?}], verdict?, pass, timestamp? }
inline nlohmann::ordered_json to_json(const VerificationReport& r, bool with_timestamp = true) {
  nlohmann::ordered_json j;
  j["version"] = r.version;
  j["case"] = r.case_name;
  j["seed"] = r.seed;
  j["samples"] = r.samples;
  j["params"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.params) j["params"][k] = v;
  j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : r.checks) {
    nlohmann::ordered_json cj;
    cj["name"] = c.name;
    cj["kind"] = verdict_name(c.kind);
    cj["max_abs"] = c.max_abs;
    cj["max_norm"] = c.max_norm;
    cj["tol"] = c.tol;
    cj["pass"] = c.pass;
    cj["worst_point"] = c.worst_point;
    if (!c.error.empty()) cj["error"] = c.error;
    j["checks"].push_back(std::move(cj));
  }
  if (!r.verdict.empty()) j["verdict"] = r.verdict;
  j["pass"] = r.pass;
  if (with_timestamp) j["timestamp"] = utc_timestamp();
  return j;
}

inline std::string format_double(double v) { return nlohmann::json(v).dump(); }

inline std::string to_text(const VerificationReport& r) {
  std::ostringstream o;
  o << "case " << r.case_name << "  (version " << r.version << ", seed " << r.seed << ", samples " << r.samples
    << ")\n";
  if (!r.params.empty()) {
    o << "params";
    for (const auto& [k, v] : r.params) o << ' ' << k << '=' << format_double(v);
    o << '\n';
  }
  for (const auto& c : r.checks) {
    o << (c.pass ? "  PASS " : "  FAIL ") << c.name << " [" << verdict_name(c.kind) << "]"
      << " max_abs=" << format_double(c.max_abs) << " max_norm=" << format_double(c.max_norm)
      << " tol=" << format_double(c.tol) << " worst_point=(";
    for (std::size_t i = 0; i < c.worst_point.size(); ++i)
      o << (i ? ", " : "") << format_double(c.worst_point[i]);
    o << ")";
    if (!c.error.empty()) o << " error: " << c.error;
    o << '\n';
  }
  if (!r.verdict.empty()) o << "verdict " << r.verdict << '\n';
  o << (r.pass ? "PASS" : "FAIL") << '\n';
  return o.str();
}

}  // namespace bitension
