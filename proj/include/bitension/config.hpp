#pragma once

// Config files describing a custom verification case. INI syntax with dotted
// section names; list values are separated by ';' (commas may occur inside
// expressions). Example:
//
//   [case]
//   name = h5_custom
//   [domain]
//   coordinates = x1, x2, x3, x4
//   box = 0.5:2; 0.5:2; 0.5:2; 0.5:2
//   [target]
//   coordinates = y1, y2, y3, y4, y5
//   box = -inf:inf; -inf:inf; -inf:inf; -inf:inf; 0:inf
//   exclude = y5=0
//   [parameters]
//   k = 1
//   [map]
//   components = 1; x1; x2; x3; x4
//   [metric.domain]
//   diagonal = 1; 1; 1; 1
//   [metric.target]
//   diagonal = y5^(-2); y5^(-2); y5^(-2); y5^(-2); y5^(-2)
//   [conformal]
//   lambda_sq = x4^(-2)
//   [base]
//   F = 1/x4
//   diagonal = x4^(-2); x4^(-2); x4^(-2); x4^(-2)
//   [checks]
//   tension = nonzero 1e-3
//   bitension = zero 1e-7
//   [sampling]
//   samples = 64
//   seed = 7

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "bitension/catalog.hpp"

namespace bitension {

struct RunConfig {
  VerificationCase verification;
  std::optional<int> samples;
  std::optional<std::uint64_t> seed;
};

namespace config_detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  if (!s.empty() && s.back() == sep) out.push_back("");
  return out;
}

/// Line number of every "[section]" header and "key =" entry.
class LineIndex {
 public:
  explicit LineIndex(const std::string& text) {
    std::istringstream in(text);
    std::string line, section;
    int no = 0;
    while (std::getline(in, line)) {
      ++no;
      const std::string t = trim(line);
      if (t.empty() || t[0] == ';' || t[0] == '#') continue;
      if (t.front() == '[' && t.back() == ']') {
        section = trim(t.substr(1, t.size() - 2));
        lines_[{section, ""}] = no;
      } else if (const auto eq = t.find('='); eq != std::string::npos) {
        lines_[{section, trim(t.substr(0, eq))}] = no;
      }
    }
  }
  int at(const std::string& section, const std::string& key = "") const {
    const auto it = lines_.find({section, key});
    return it == lines_.end() ? 0 : it->second;
  }

 private:
  std::map<std::pair<std::string, std::string>, int> lines_;
};

class Reader {
 public:
  Reader(const boost::property_tree::ptree& tree, const LineIndex& lines) : tree_(tree), lines_(lines) {}

  const boost::property_tree::ptree* section(const std::string& name) const {
    for (const auto& [k, v] : tree_)
      if (k == name) return &v;
    return nullptr;
  }
  std::optional<std::string> get(const std::string& sec, const std::string& key) const {
    const auto* s = section(sec);
    if (!s) return std::nullopt;
    for (const auto& [k, v] : *s)
      if (k == key) return trim(v.data());
    return std::nullopt;
  }
  std::string require(const std::string& sec, const std::string& key) const {
    if (!section(sec)) throw ConfigError("missing section [" + sec + "]");
    auto v = get(sec, key);
    if (!v) throw ConfigError("section [" + sec + "] needs key '" + key + "'", lines_.at(sec));
    return *v;
  }
  [[noreturn]] void fail(const std::string& sec, const std::string& key, const std::string& what) const {
    throw ConfigError("[" + sec + "] " + key + ": " + what, lines_.at(sec, key));
  }

 private:
  const boost::property_tree::ptree& tree_;
  const LineIndex& lines_;
};

inline double parse_number(const Reader& r, const std::string& sec, const std::string& key, const std::string& s) {
  const std::string t = trim(s);
  if (t == "inf" || t == "+inf") return std::numeric_limits<double>::infinity();
  if (t == "-inf") return -std::numeric_limits<double>::infinity();
  try {
    std::size_t used = 0;
    const double v = std::stod(t, &used);
    if (used == t.size()) return v;
  } catch (const std::exception&) {
  }
  r.fail(sec, key, "'" + t + "' is not a number");
}

inline ChartDomain read_chart(const Reader& r, const std::string& sec) {
  ChartDomain d = ChartDomain::unbounded(split(r.require(sec, "coordinates"), ','));
  std::set<std::string> seen;
  for (const auto& c : d.coordinates) {
    if (!std::regex_match(c, std::regex("[A-Za-z_][A-Za-z0-9_]*")))
      r.fail(sec, "coordinates", "'" + c + "' is not an identifier");
    if (!seen.insert(c).second) r.fail(sec, "coordinates", "duplicate coordinate '" + c + "'");
  }
  if (auto box = r.get(sec, "box")) {
    const auto parts = split(*box, ';');
    if (static_cast<int>(parts.size()) != d.dim()) r.fail(sec, "box", "expected one interval per coordinate");
    for (int i = 0; i < d.dim(); ++i) {
      const auto ends = split(parts[i], ':');
      if (ends.size() != 2) r.fail(sec, "box", "intervals are written lo:hi");
      d.box[i] = {parse_number(r, sec, "box", ends[0]), parse_number(r, sec, "box", ends[1])};
      if (!(d.box[i].lo < d.box[i].hi)) r.fail(sec, "box", "empty interval for '" + d.coordinates[i] + "'");
    }
  }
  if (auto ex = r.get(sec, "exclude")) {
    for (const auto& item : split(*ex, ';')) {
      const auto kv = split(item, '=');
      if (kv.size() != 2) r.fail(sec, "exclude", "entries are written coordinate=value");
      const auto it = std::find(d.coordinates.begin(), d.coordinates.end(), kv[0]);
      if (it == d.coordinates.end()) r.fail(sec, "exclude", "unknown coordinate '" + kv[0] + "'");
      d.excluded.push_back({static_cast<int>(it - d.coordinates.begin()), parse_number(r, sec, "exclude", kv[1])});
    }
  }
  return d;
}

/// Parses an expression and checks that every identifier is a coordinate of
/// the chart or a declared parameter.
inline Expr read_expr(const Reader& r, const std::string& sec, const std::string& key, const std::string& src,
                      const ChartDomain& chart, const Params& params) {
  Expr e;
  try {
    e = Expr::parse(src);
  } catch (const Error& ex) {
    r.fail(sec, key, std::string(ex.what()) + " in '" + src + "'");
  }
  for (const auto& s : e.symbols()) {
    const bool coord = std::find(chart.coordinates.begin(), chart.coordinates.end(), s) != chart.coordinates.end();
    if (!coord && !params.count(s)) r.fail(sec, key, "unbound identifier '" + s + "'");
  }
  return e;
}

inline std::vector<Expr> read_list(const Reader& r, const std::string& sec, const std::string& key,
                                   const ChartDomain& chart, const Params& params) {
  std::vector<Expr> out;
  for (const auto& item : split(r.require(sec, key), ';')) out.push_back(read_expr(r, sec, key, item, chart, params));
  return out;
}

inline RiemannianMetric read_metric(const Reader& r, const std::string& sec, const ChartDomain& chart,
                                    const Params& params) {
  const int n = chart.dim();
  const bool diag = r.get(sec, "diagonal").has_value();
  const bool full = r.get(sec, "components").has_value();
  if (diag == full) throw ConfigError("section [" + sec + "] needs exactly one of 'diagonal' or 'components'");
  if (diag) {
    auto d = read_list(r, sec, "diagonal", chart, params);
    if (static_cast<int>(d.size()) != n) r.fail(sec, "diagonal", "expected " + std::to_string(n) + " entries");
    return RiemannianMetric::diagonal(chart, d, params);
  }
  auto c = read_list(r, sec, "components", chart, params);
  if (static_cast<int>(c.size()) != n * n)
    r.fail(sec, "components", "expected " + std::to_string(n * n) + " entries in row-major order");
  return RiemannianMetric{chart, std::move(c), params};
}

}  // namespace config_detail

/// Reads a case from config text; every error is a ConfigError.
inline RunConfig parse_config(const std::string& text) {
  using namespace config_detail;
  boost::property_tree::ptree tree;
  try {
    std::istringstream in(text);
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(e.message(), static_cast<int>(e.line()));
  }
  const LineIndex lines(text);
  const Reader r(tree, lines);

  RunConfig out;
  VerificationCase& c = out.verification;
  c.name = r.get("case", "name").value_or("custom");

  Params params;
  if (const auto* s = r.section("parameters"))
    for (const auto& [k, v] : *s) {
      params[k] = parse_number(r, "parameters", k, v.data());
      c.params[k] = params[k];
    }

  const ChartDomain dom = read_chart(r, "domain");
  if (dom.dim() > kMaxJetVars) r.fail("domain", "coordinates", "at most 8 coordinates are supported");
  const ChartDomain tgt = read_chart(r, "target");
  for (const auto& name : dom.coordinates)
    if (params.count(name)) r.fail("parameters", name, "'" + name + "' is also a coordinate");

  c.phi = SmoothMap{dom, read_list(r, "map", "components", dom, params), params};
  if (c.phi.codomain_dim() != tgt.dim())
    r.fail("map", "components", "expected " + std::to_string(tgt.dim()) + " components");
  c.g = read_metric(r, "metric.domain", dom, params);
  c.h = read_metric(r, "metric.target", tgt, params);
  if (auto l = r.get("conformal", "lambda_sq")) c.lambda_sq = ScalarField{read_expr(r, "conformal", "lambda_sq", *l, dom, params), params};
  if (r.section("base")) {
    c.factor = ScalarField{read_expr(r, "base", "F", r.require("base", "F"), dom, params), params};
    c.base_metric = read_metric(r, "base", dom, params);
  }

  const auto* checks = r.section("checks");
  if (!checks || checks->empty()) throw ConfigError("section [checks] must list at least one check");
  for (const auto& [name, v] : *checks) {
    try {
      find_check(name);
    } catch (const ConfigError&) {
      r.fail("checks", name, "unknown check");
    }
    const auto parts = split(std::regex_replace(trim(v.data()), std::regex("\\s+"), " "), ' ');
    if (parts.size() != 2 || (parts[0] != "zero" && parts[0] != "nonzero"))
      r.fail("checks", name, "expected 'zero <tol>' or 'nonzero <bound>'");
    const double tol = parse_number(r, "checks", name, parts[1]);
    if (!(tol > 0.0)) r.fail("checks", name, "tolerance must be positive");
    c.expectations.push_back({name, parts[0] == "zero" ? Verdict::Zero : Verdict::Nonzero, tol});
  }

  if (auto s = r.get("sampling", "samples")) {
    const double v = parse_number(r, "sampling", "samples", *s);
    if (v < 1 || v != std::floor(v)) r.fail("sampling", "samples", "must be a positive integer");
    out.samples = static_cast<int>(v);
  }
  if (auto s = r.get("sampling", "seed")) {
    try {
      std::size_t used = 0;
      out.seed = std::stoull(*s, &used);
      if (used != s->size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      r.fail("sampling", "seed", "must be a non-negative integer");
    }
  }
  try {
    validate_case(c);
  } catch (const ConfigError& e) {
    throw ConfigError(e.what(), lines.at("checks"));
  }
  return out;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace bitension
