// bitension: command-line front end.
//
// Exit codes: 0 pass, 1 check failure, 2 usage or config error,
// 3 evaluation error, 4 domain violation.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bitension/catalog.hpp"
#include "bitension/config.hpp"
#include "bitension/random_cases.hpp"

namespace {

using namespace bitension;

enum Exit { kPass = 0, kCheckFailed = 1, kUsage = 2, kEvaluation = 3, kDomain = 4 };

constexpr std::uint64_t kDefaultSeed = 1;

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag, std::optional<std::uint64_t> fallback = {}) {
  if (flag) return *flag;
  if (const char* env = std::getenv("BITENSION_SEED")) {
    try {
      std::size_t used = 0;
      const std::uint64_t v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError(std::string("BITENSION_SEED is not a non-negative integer: '") + env + "'");
  }
  return fallback.value_or(kDefaultSeed);
}

int emit(const VerificationReport& r, const std::string& format) {
  if (format == "json")
    std::cout << to_json(r).dump(2) << '\n';
  else
    std::cout << to_text(r);
  if (r.pass) return kPass;
  return r.evaluation_failed() ? kEvaluation : kCheckFailed;
}

std::map<std::string, double> parse_params(const std::vector<std::string>& items) {
  std::map<std::string, double> out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--param expects k=v, got '" + item + "'");
    const std::string key = item.substr(0, eq), val = item.substr(eq + 1);
    try {
      std::size_t used = 0;
      out[key] = std::stod(val, &used);
      if (used != val.size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw ConfigError("--param " + key + ": '" + val + "' is not a number");
    }
  }
  return out;
}

struct Options {
  std::string format = "text";
  std::optional<std::uint64_t> seed;
  int samples = 64;
  std::optional<double> tol;

  // catalog
  std::string case_name;
  std::vector<std::string> params;

  // check-transform
  std::string law;
  std::string dims;
  int cases = 100;
  double transform_tol = 1e-7;

  // cylinder
  double radius = 1.0, c1 = 0.0, c2 = 2.0, z0 = 0.0, z1 = 1.0;
  std::string sign = "+";
  int steps = 256;
  std::string csv;

  // weierstrass / custom
  std::string config;
  std::string wcase;
};

int cmd_catalog_list(const Options& o) {
  if (o.format == "json") {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const auto& c : catalog_cases()) {
      nlohmann::ordered_json e;
      e["name"] = c.name;
      e["description"] = c.description;
      e["params"] = c.defaults;
      j.push_back(e);
    }
    std::cout << j.dump(2) << '\n';
    return kPass;
  }
  for (const auto& c : catalog_cases()) {
    std::cout << c.name << "  " << c.description << "\n   ";
    for (const auto& [k, v] : c.defaults) std::cout << ' ' << k << '=' << format_double(v);
    std::cout << '\n';
  }
  return kPass;
}

int cmd_catalog_verify(const Options& o) {
  const VerificationCase c = build_case(o.case_name, parse_params(o.params));
  return emit(verify_case(c, o.samples, resolve_seed(o.seed), o.tol), o.format);
}

int cmd_check_transform(const Options& o) {
  Law law;
  if (o.law == "tension") law = Law::Tension;
  else if (o.law == "jacobi") law = Law::Jacobi;
  else if (o.law == "bitension") law = Law::Bitension;
  else throw ConfigError("--law must be tension, jacobi or bitension");
  const auto parts = config_detail::split(o.dims, ',');
  int m = 0, n = 0;
  try {
    if (parts.size() != 2) throw std::invalid_argument("dims");
    m = std::stoi(parts[0]);
    n = std::stoi(parts[1]);
  } catch (const std::exception&) {
    throw ConfigError("--dims expects m,n");
  }
  if (m < 2 || m > 5 || n < 2 || n > 6) throw ConfigError("--dims needs m in 2..5 and n in 2..6");
  if (o.cases < 1) throw ConfigError("--cases must be positive");
  if (!(o.transform_tol > 0.0)) throw ConfigError("--tol must be positive");

  const std::uint64_t seed = resolve_seed(o.seed);
  Rng rng(seed);
  VerificationReport rep;
  rep.case_name = std::string("check-transform/") + law_name(law);
  rep.seed = seed;
  rep.samples = o.cases;
  rep.params = {{"m", m}, {"n", n}};
  CheckRecord rec;
  rec.name = std::string(law_name(law)) + "_transform";
  rec.tol = o.transform_tol;
  for (int k = 0; k < o.cases; ++k) {
    const RandomCase c = random_case(rng, m, n);
    try {
      const LawComparison cmp = compare_law(law, c);
      if (k == 0 || cmp.discrepancy > rec.max_abs) {
        rec.max_abs = rec.max_norm = cmp.discrepancy;
        if (rec.error.empty()) rec.worst_point = c.x;
      }
    } catch (const Error& e) {
      if (rec.error.empty()) {
        rec.error = e.what();
        rec.worst_point = c.x;
      }
    }
  }
  rec.pass = rec.error.empty() && rec.max_abs <= rec.tol;
  rep.checks.push_back(rec);
  rep.finalize();
  return emit(rep, o.format);
}

int cmd_cylinder(const Options& o) {
  CylinderParams p;
  p.R = o.radius;
  p.C1 = o.c1;
  p.C2 = o.c2;
  p.z0 = o.z0;
  p.z1 = o.z1;
  if (o.sign == "+" || o.sign == "+1" || o.sign == "1") p.sign = 1;
  else if (o.sign == "-" || o.sign == "-1") p.sign = -1;
  else throw ConfigError("--sign must be + or -");
  if (o.steps < 16) throw ConfigError("--steps must be at least 16");
  require_positive_lambda(p);
  const double y0 = lambda_sq_closed_form(p, p.z0);
  const double s = p.sign;
  const double y0p = (s * p.C2 * std::exp(s * p.z0 / p.R) + s * p.C1 / p.C2 * p.R * p.R * std::exp(-s * p.z0 / p.R)) /
                     (2.0 * p.R);
  const OdeSolution sol = solve_ode(p, y0, y0p, o.steps);

  if (!o.csv.empty()) {
    std::ofstream out(o.csv);
    if (!out) throw ConfigError("cannot write '" + o.csv + "'");
    out << "z,lambda_sq_closed,lambda_sq_rk4,first_integral_drift\n";
    out.precision(17);
    for (std::size_t k = 0; k < sol.z.size(); ++k)
      out << sol.z[k] << ',' << sol.closed[k] << ',' << sol.y[k] << ',' << sol.drift[k] << '\n';
  }

  VerificationReport rep;
  rep.case_name = "cylinder-solve";
  rep.seed = 0;
  rep.samples = o.steps + 1;
  rep.params = {{"R", p.R}, {"C1", p.C1}, {"C2", p.C2}, {"sign", s}, {"z0", p.z0}, {"z1", p.z1}};
  auto worst = [&](const std::vector<double>& v) {
    std::size_t at = 0;
    for (std::size_t k = 1; k < v.size(); ++k)
      if (v[k] > v[at]) at = k;
    return Point{sol.z[at]};
  };
  std::vector<double> dev;
  for (std::size_t k = 0; k < sol.z.size(); ++k) dev.push_back(std::abs(sol.y[k] - sol.closed[k]));
  CheckRecord d{"rk4_deviation", Verdict::Zero, sol.max_deviation, sol.max_deviation, 1e-8};
  d.pass = d.max_abs <= d.tol;
  d.worst_point = worst(dev);
  CheckRecord f{"first_integral_drift", Verdict::Zero, sol.max_drift, sol.max_drift, 1e-10};
  f.pass = f.max_abs <= f.tol;
  f.worst_point = worst(sol.drift);
  rep.checks = {d, f};
  rep.finalize();
  return emit(rep, o.format);
}

int cmd_weierstrass(const Options& o) {
  if (o.config.empty() == o.wcase.empty()) throw ConfigError("give exactly one of --config or --case");
  VerificationCase c;
  std::optional<std::uint64_t> config_seed;
  int samples = o.samples;
  if (!o.wcase.empty()) {
    c = build_case(o.wcase);
  } else {
    const RunConfig rc = load_config(o.config);
    c = rc.verification;
    config_seed = rc.seed;
    if (rc.samples) samples = *rc.samples;
  }
  return emit(weierstrass_check(c, samples, resolve_seed(o.seed, config_seed)), o.format);
}

int cmd_custom(const Options& o, bool samples_given) {
  const RunConfig rc = load_config(o.config);
  const int samples = samples_given || !rc.samples ? o.samples : *rc.samples;
  return emit(verify_case(rc.verification, samples, resolve_seed(o.seed, rc.seed), o.tol), o.format);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical verification of biharmonic maps and conformal changes of the domain metric"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub, bool sampling) {
    sub->add_option("--format", o.format, "text or json")->check(CLI::IsMember({"text", "json"}));
    sub->add_option("--seed", o.seed, "random seed (default from BITENSION_SEED, else 1)");
    if (sampling) sub->add_option("--samples", o.samples, "number of sample points")->check(CLI::PositiveNumber);
  };

  auto* catalog = app.add_subcommand("catalog", "built-in verification cases");
  catalog->require_subcommand(1);
  auto* list = catalog->add_subcommand("list", "list the built-in cases");
  list->add_option("--format", o.format, "text or json")->check(CLI::IsMember({"text", "json"}));
  auto* verify = catalog->add_subcommand("verify", "verify one built-in case");
  verify->add_option("name", o.case_name, "case name")->required();
  verify->add_option("--param", o.params, "case parameter k=v (repeatable)");
  verify->add_option("--tol", o.tol, "tolerance for every zero check");
  add_common(verify, true);

  auto* transform = app.add_subcommand("check-transform", "randomized conformal-change law checks");
  transform->add_option("--law", o.law, "tension, jacobi or bitension")->required();
  transform->add_option("--dims", o.dims, "m,n")->required();
  transform->add_option("--cases", o.cases, "number of random cases");
  transform->add_option("--tol", o.transform_tol, "maximum relative discrepancy");
  add_common(transform, false);

  auto* cylinder = app.add_subcommand("cylinder", "conformal cylinder family");
  cylinder->require_subcommand(1);
  auto* solve = cylinder->add_subcommand("solve", "RK4 solve of the conformal-factor ODE against the closed form");
  solve->add_option("--radius", o.radius, "cylinder radius R");
  solve->add_option("--c1", o.c1, "constant C1");
  solve->add_option("--c2", o.c2, "constant C2 (nonzero)");
  solve->add_option("--sign", o.sign, "+ or -");
  solve->add_option("--z0", o.z0, "start of the z range");
  solve->add_option("--z1", o.z1, "end of the z range");
  solve->add_option("--steps", o.steps, "RK4 steps");
  solve->add_option("--emit-csv", o.csv, "write z, closed form, RK4 and drift columns");
  solve->add_option("--format", o.format, "text or json")->check(CLI::IsMember({"text", "json"}));

  auto* weier = app.add_subcommand("weierstrass", "complex-section checks for surfaces in flat R^n");
  weier->require_subcommand(1);
  auto* wcheck = weier->add_subcommand("check", "W1, W2, W3 and holomorphy with a verdict");
  wcheck->add_option("--config", o.config, "config file");
  wcheck->add_option("--case", o.wcase, "built-in case name");
  add_common(wcheck, true);

  auto* custom = app.add_subcommand("custom", "cases defined in a config file");
  custom->require_subcommand(1);
  auto* cverify = custom->add_subcommand("verify", "verify a config-defined case");
  cverify->add_option("--config", o.config, "config file")->required();
  cverify->add_option("--tol", o.tol, "tolerance for every zero check");
  add_common(cverify, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsage;
  }

  try {
    if (list->parsed()) return cmd_catalog_list(o);
    if (verify->parsed()) return cmd_catalog_verify(o);
    if (transform->parsed()) return cmd_check_transform(o);
    if (solve->parsed()) return cmd_cylinder(o);
    if (wcheck->parsed()) return cmd_weierstrass(o);
    if (cverify->parsed()) return cmd_custom(o, cverify->count("--samples") > 0);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ParameterRejected& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDomain;
  } catch (const UnboundNameError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kEvaluation;
  }
  return kUsage;
}
