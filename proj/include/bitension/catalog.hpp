#pragma once

// Named verification cases and the driver that evaluates their expectations at
// low-discrepancy sample points.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bitension/conformal.hpp"
#include "bitension/cylinder.hpp"
#include "bitension/report.hpp"
#include "bitension/surfaces.hpp"
#include "bitension/weierstrass.hpp"

namespace bitension {

struct Expectation {
  std::string check;
  Verdict verdict = Verdict::Zero;
  double tol = 1e-7;
};

/// A map between charts with its metrics and the optional extra data some
/// checks need: the conformal factor lambda^2 with phi*h = lambda^2 g, and a
/// base metric g0 with factor F such that g = F^-2 g0.
struct VerificationCase {
  std::string name;
  std::map<std::string, double> params;
  SmoothMap phi;
  RiemannianMetric g, h;
  std::optional<ScalarField> lambda_sq;
  std::optional<RiemannianMetric> base_metric;
  std::optional<ScalarField> factor;
  std::vector<Expectation> expectations;
  std::string key_check;  // the check a perturbed variant must fail
};

// ---------------------------------------------------------------------------
// Checks
// ---------------------------------------------------------------------------

inline double evaluate_at(const ScalarField& f, const ChartDomain& dom, const Point& x) {
  EvalContext<double> ctx;
  for (int i = 0; i < dom.dim(); ++i) ctx.variables.emplace(dom.coordinates[i], x[i]);
  ctx.parameters = &f.parameters;
  return evaluate(f.expr, ctx);
}

namespace detail {

inline std::vector<double> flatten(const std::vector<std::complex<double>>& z) {
  std::vector<double> out;
  for (const auto& c : z) {
    out.push_back(c.real());
    out.push_back(c.imag());
  }
  return out;
}

inline const ScalarField& need_lambda(const VerificationCase& c) {
  if (!c.lambda_sq) throw Error("case has no conformal factor");
  return *c.lambda_sq;
}

}  // namespace detail

struct CheckSpec {
  std::string name;
  std::string description;
  bool needs_lambda = false;
  bool needs_base = false;
  int surface_codim = 0;  // 0: any; 2: m = 2; 3: m = 2 and n = 3
  std::function<std::vector<double>(const VerificationCase&, const Point&)> eval;
};

inline const std::vector<CheckSpec>& check_registry() {
  using V = std::vector<double>;
  using C = const VerificationCase&;
  using P = const Point&;
  static const std::vector<CheckSpec> reg = {
      {"tension", "tension field tau(phi, g)", false, false, 0,
       [](C c, P x) { return tension_field(c.phi, c.g, c.h, x); }},
      {"bitension", "bitension field tau2(phi, g)", false, false, 0,
       [](C c, P x) { return bitension_field(c.phi, c.g, c.h, x); }},
      {"harmonic_biharmonic_condition", "condition for the base-harmonic map to be biharmonic for g = F^-2 g0",
       false, true, 0,
       [](C c, P x) { return harmonic_biharmonic_condition(c.phi, *c.base_metric, c.h, *c.factor, x); }},
      {"conformality", "(recovered lambda^2 - given lambda^2, relative deviation of phi*h from lambda^2 g)", true,
       false, 0,
       [](C c, P x) {
         const ConformalityResult r = conformality_factor(c.phi, c.g, c.h, x, 1e-8);
         return V{r.lambda_sq - evaluate_at(detail::need_lambda(c), c.phi.domain, x), r.deviation};
       }},
      {"conformal_immersion", "lambda^4 tau2(gbar) minus the g-side bracket; zero iff biharmonic", true, false, 0,
       [](C c, P x) { return conformal_immersion_residual(c.phi, c.g, c.h, detail::need_lambda(c), x).residual; }},
      {"conformal_immersion_identity", "lambda^4 tau2(gbar) - bracket - tau2(g); zero for any conformal immersion",
       true, false, 0,
       [](C c, P x) { return conformal_immersion_residual(c.phi, c.g, c.h, detail::need_lambda(c), x).identity; }},
      {"r3_tangential", "tangential part of the surface biharmonicity system", true, false, 3,
       [](C c, P x) {
         const R3Residual r = r3_system_residual(c.phi, c.g, c.h, detail::need_lambda(c), x);
         return V{r.tangential[0], r.tangential[1]};
       }},
      {"r3_normal", "normal part of the surface biharmonicity system", true, false, 3,
       [](C c, P x) { return V{r3_system_residual(c.phi, c.g, c.h, detail::need_lambda(c), x).normal}; }},
      {"w1", "sum of squares of the complex section", false, false, 2,
       [](C c, P x) {
         const auto z = w1(w_section(c.phi, c.g, c.h, x));
         return V{z.real(), z.imag()};
       }},
      {"w2", "sum of squared moduli of the complex section", false, false, 2,
       [](C c, P x) { return V{w2(w_section(c.phi, c.g, c.h, x))}; }},
      {"w3", "d/dzbar d/dz (sigma^-1 d phi/dzbar)", false, false, 2,
       [](C c, P x) { return detail::flatten(w3_residual(w_section(c.phi, c.g, c.h, x))); }},
      {"holomorphy", "|d phi^a/dzbar| per component", false, false, 2,
       [](C c, P x) {
         const WSection w = w_section(c.phi, c.g, c.h, x);
         V out;
         for (const auto& p : w.phi) out.push_back(std::abs(dzbar(p).value()));
         return out;
       }},
      {"weierstrass_bitension", "complex bitension formula minus the direct bitension field", false, false, 2,
       [](C c, P x) {
         const auto z = bitension_complex(w_section(c.phi, c.g, c.h, x));
         const V b = bitension_field(c.phi, c.g, c.h, x);
         V out;
         for (std::size_t k = 0; k < z.size(); ++k) {
           out.push_back(z[k].real() - b[k]);
           out.push_back(z[k].imag());
         }
         return out;
       }},
  };
  return reg;
}

inline const CheckSpec& find_check(const std::string& name) {
  for (const auto& s : check_registry())
    if (s.name == name) return s;
  throw ConfigError("unknown check '" + name + "'");
}

/// Throws ConfigError when an expectation cannot be evaluated on this case.
inline void validate_case(const VerificationCase& c) {
  if (c.phi.codomain_dim() != c.h.dim())
    throw ConfigError("map has " + std::to_string(c.phi.codomain_dim()) + " components but the target has dimension " +
                      std::to_string(c.h.dim()));
  if (c.g.dim() != c.phi.domain_dim()) throw ConfigError("domain metric dimension does not match the map's domain");
  if (c.expectations.empty()) throw ConfigError("case '" + c.name + "' has no checks");
  for (const auto& e : c.expectations) {
    const CheckSpec& s = find_check(e.check);
    if (!(e.tol > 0.0)) throw ConfigError("tolerance for check '" + e.check + "' must be positive");
    if (s.needs_lambda && !c.lambda_sq) throw ConfigError("check '" + e.check + "' needs a conformal factor lambda_sq");
    if (s.needs_base && !(c.base_metric && c.factor))
      throw ConfigError("check '" + e.check + "' needs a base metric and a factor F");
    if (s.surface_codim >= 2 && c.phi.domain_dim() != 2)
      throw ConfigError("check '" + e.check + "' needs a 2-dimensional domain");
    if (s.surface_codim == 3 && c.phi.codomain_dim() != 3)
      throw ConfigError("check '" + e.check + "' needs a 3-dimensional target");
  }
}

/// |tau|_h + 1 at x, the scale used for the normalized residuals.
inline double residual_scale(const VerificationCase& c, const Point& x) {
  PullbackGeometry geo(c.phi, c.g, c.h, x, 2);
  const std::vector<double> tau = values(geo.tension());
  const JetVec& hv = geo.target_metric_at_image().g;
  const int n = geo.n();
  double s = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) s += hv[a * n + b].value() * tau[a] * tau[b];
  return std::sqrt(std::max(s, 0.0)) + 1.0;
}

/**
 * Evaluates every expectation at `samples` points of the map's domain box.
 * tol_override replaces the tolerance of every "zero" expectation. An error at
 * a point fails the check, keeps the first message and records the point.
 */
inline VerificationReport verify_case(const VerificationCase& c, int samples, std::uint64_t seed,
                                      std::optional<double> tol_override = std::nullopt) {
  validate_case(c);
  if (samples < 1) throw ConfigError("sample count must be positive");
  if (tol_override && !(*tol_override > 0.0)) throw ConfigError("tolerance must be positive");
  VerificationReport rep;
  rep.case_name = c.name;
  rep.seed = seed;
  rep.samples = samples;
  rep.params = c.params;
  const std::vector<Point> points = c.phi.domain.sample(samples, seed);

  struct Acc {
    const CheckSpec* spec;
    CheckRecord rec;
    bool seen = false;
  };
  std::vector<Acc> acc;
  for (const auto& e : c.expectations) {
    Acc a{&find_check(e.check), {}};
    a.rec.name = e.check;
    a.rec.kind = e.verdict;
    a.rec.tol = (e.verdict == Verdict::Zero && tol_override) ? *tol_override : e.tol;
    acc.push_back(std::move(a));
  }

  for (const Point& x : points) {
    double scale = 1.0;
    try {
      scale = residual_scale(c, x);
    } catch (const Error&) {
    }
    for (auto& a : acc) {
      try {
        const double v = norm(a.spec->eval(c, x));
        if (!std::isfinite(v)) throw Error("non-finite residual");
        const bool worse = a.rec.kind == Verdict::Zero ? v > a.rec.max_abs : v < a.rec.max_abs;
        if (!a.seen || worse) {
          a.rec.max_abs = v;
          if (a.rec.error.empty()) a.rec.worst_point = x;
        }
        const double nv = v / scale;
        if (!a.seen || (a.rec.kind == Verdict::Zero ? nv > a.rec.max_norm : nv < a.rec.max_norm))
          a.rec.max_norm = nv;
        a.seen = true;
      } catch (const Error& ex) {
        if (a.rec.error.empty()) {
          a.rec.error = ex.what();
          a.rec.worst_point = x;
        }
      }
    }
  }
  for (auto& a : acc) {
    CheckRecord& r = a.rec;
    r.pass = r.error.empty() && a.seen &&
             (r.kind == Verdict::Zero ? r.max_abs <= r.tol : r.max_abs > r.tol);
    rep.checks.push_back(std::move(r));
  }
  rep.finalize();
  return rep;
}

/**
 * Conformality, immersion and biharmonicity through the complex section, with
 * a verdict from the measured maxima: "not conformal", "not immersed", "not
 * biharmonic", "harmonic" or "proper biharmonic". The case's own expectations
 * on w1, w3 and holomorphy are kept; w1, w2 and w3 are added when missing.
 */
inline VerificationReport weierstrass_check(VerificationCase c, int samples, std::uint64_t seed) {
  if (c.phi.domain_dim() != 2) throw ConfigError("the Weierstrass check needs a 2-dimensional domain");
  const std::vector<Point> points = c.phi.domain.sample(samples, seed);
  if (points.empty()) throw ConfigError("sample count must be positive");
  try {
    const PullbackGeometry geo(c.phi, c.g, c.h, points.front(), 2);
    detail::require_flat_cartesian(c.h, geo.image());
  } catch (const GeometryError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  std::vector<Expectation> keep;
  for (const char* name : {"w1", "w2", "w3", "holomorphy"}) {
    auto it = std::find_if(c.expectations.begin(), c.expectations.end(), [&](const Expectation& e) { return e.check == name; });
    if (it != c.expectations.end()) keep.push_back(*it);
    else if (std::string(name) == "w1") keep.push_back({"w1", Verdict::Zero, 1e-12});
    else if (std::string(name) == "w2") keep.push_back({"w2", Verdict::Nonzero, 1e-12});
    else if (std::string(name) == "w3") keep.push_back({"w3", Verdict::Zero, 1e-9});
  }
  c.expectations = keep;
  VerificationReport rep = verify_case(c, samples, seed);

  double w1max = 0, w2min = std::numeric_limits<double>::infinity(), w3max = 0, hol = 0;
  for (const auto& x : points) {
    const WSection w = w_section(c.phi, c.g, c.h, x);
    w1max = std::max(w1max, std::abs(w1(w)));
    w2min = std::min(w2min, w2(w));
    w3max = std::max(w3max, norm(detail::flatten(w3_residual(w))));
    hol = std::max(hol, holomorphy_magnitude(w));
  }
  if (w1max > 1e-12 * std::max(1.0, w2min)) rep.verdict = "not conformal";
  else if (!(w2min > 1e-12)) rep.verdict = "not immersed";
  else if (w3max > 1e-9) rep.verdict = "not biharmonic";
  else if (hol < 1e-10) rep.verdict = "harmonic";
  else rep.verdict = "proper biharmonic";
  return rep;
}

// ---------------------------------------------------------------------------
// Built-in cases
// ---------------------------------------------------------------------------

struct CaseInfo {
  std::string name;
  std::string description;
  std::map<std::string, double> defaults;
};

inline const std::vector<CaseInfo>& catalog_cases() {
  static const std::vector<CaseInfo> cases = {
      {"h5_inclusion", "(1, x1..x4) from flat R^4 into the upper half-space model of H^5", {{"perturb", 0}}},
      {"s5_stereographic", "(u1..u4, 0) from flat R^4 into the stereographic chart of S^5", {{"perturb", 0}}},
      {"cylinder_family", "conformal cylinder (R, theta, z) with g = lambda^-2 (R^2 dtheta^2 + dz^2)",
       {{"R", 1}, {"C1", 0}, {"C2", 2}, {"sign", 1}, {"z0", 0}, {"z1", 1}, {"perturb", 0}}},
      {"r2_wrap_r3", "(R cos(x/R), R sin(x/R), y) with g = e^{y/R}(dx^2 + dy^2) into R^3", {{"R", 1}, {"perturb", 0}}},
      {"r2_wrap_r6", "the same wrap with doubled components into R^6", {{"R", 1}, {"perturb", 0}}},
      {"plane_inclusion", "(u, v, 0) from the flat plane into R^3", {{"perturb", 0}}},
      {"identity", "identity of R^m with the metric 4 delta/(1+|x|^2)^2", {{"m", 3}, {"perturb", 0}}},
  };
  return cases;
}

namespace detail {

inline std::vector<std::string> names(const std::string& prefix, int count) {
  std::vector<std::string> out;
  for (int i = 0; i < count; ++i) out.push_back(prefix + std::to_string(i + 1));
  return out;
}

inline std::vector<Expr> parse_all(const std::vector<std::string>& src) {
  std::vector<Expr> out;
  for (const auto& s : src) out.push_back(Expr::parse(s));
  return out;
}

/// 4 delta / (1 + |p|^2)^2 in the coordinates p1..pn.
inline RiemannianMetric spherical_metric(ChartDomain dom) {
  std::string r = "1";
  for (const auto& c : dom.coordinates) r += " + " + c + "^2";
  const Expr e = Expr::parse("4/(" + r + ")^2");
  return RiemannianMetric::diagonal(std::move(dom), std::vector<Expr>(dom.dim(), e));
}

inline RiemannianMetric euclidean(int n) { return RiemannianMetric::euclidean(ChartDomain::unbounded(names("y", n))); }

inline std::vector<Expectation> perturbed_expectations(const VerificationCase& c) {
  std::vector<Expectation> out;
  for (const auto& e : c.expectations)
    if (e.check == c.key_check || e.check == "bitension") out.push_back(e);
  return out;
}

inline bool flag(const std::map<std::string, double>& p, const std::string& k) {
  const double v = p.at(k);
  if (v != 0.0 && v != 1.0) throw ConfigError("parameter '" + k + "' must be 0 or 1");
  return v == 1.0;
}

inline VerificationCase h5_inclusion(const std::map<std::string, double>& p) {
  VerificationCase c;
  const bool perturb = flag(p, "perturb");
  const ChartDomain dom = ChartDomain::boxed(names("x", 4), std::vector<Interval>(4, {0.5, 2.0}));
  c.phi = {dom, parse_all({"1", "x1", "x2", "x3", perturb ? "x4 + 0.5*x4^2" : "x4"}), {}};
  c.g = RiemannianMetric::euclidean(dom);
  ChartDomain tgt = ChartDomain::unbounded(names("y", 5));
  tgt.box[4].lo = 0.0;
  tgt.excluded.push_back({4, 0.0});
  c.h = RiemannianMetric::diagonal(tgt, std::vector<Expr>(5, Expr::parse("y5^(-2)")));
  c.lambda_sq = ScalarField{Expr::parse("x4^(-2)"), {}};
  c.base_metric = RiemannianMetric::diagonal(dom, std::vector<Expr>(4, Expr::parse("x4^(-2)")));
  c.factor = ScalarField{Expr::parse("1/x4"), {}};
  c.expectations = {{"tension", Verdict::Nonzero, 1e-3},
                    {"bitension", Verdict::Zero, 1e-7},
                    {"harmonic_biharmonic_condition", Verdict::Zero, 1e-7},
                    {"conformality", Verdict::Zero, 1e-12},
                    {"conformal_immersion", Verdict::Zero, 1e-7},
                    {"conformal_immersion_identity", Verdict::Zero, 1e-7}};
  c.key_check = "bitension";
  return c;
}

inline VerificationCase s5_stereographic(const std::map<std::string, double>& p) {
  VerificationCase c;
  const bool perturb = flag(p, "perturb");
  const ChartDomain dom = ChartDomain::boxed(names("u", 4), std::vector<Interval>(4, {-1.0, 1.0}));
  c.phi = {dom, parse_all({"u1", "u2", "u3", "u4", perturb ? "0.5*u1^2" : "0"}), {}};
  c.g = RiemannianMetric::euclidean(dom);
  c.h = spherical_metric(ChartDomain::unbounded(names("y", 5)));
  c.lambda_sq = ScalarField{Expr::parse("4/(1 + u1^2 + u2^2 + u3^2 + u4^2)^2"), {}};
  c.base_metric = spherical_metric(dom);
  c.factor = ScalarField{Expr::parse("2/(1 + u1^2 + u2^2 + u3^2 + u4^2)"), {}};
  c.expectations = {{"tension", Verdict::Nonzero, 1e-3},
                    {"bitension", Verdict::Zero, 1e-7},
                    {"harmonic_biharmonic_condition", Verdict::Zero, 1e-7},
                    {"conformality", Verdict::Zero, 1e-12},
                    {"conformal_immersion", Verdict::Zero, 1e-7},
                    {"conformal_immersion_identity", Verdict::Zero, 1e-7}};
  c.key_check = "bitension";
  return c;
}

inline VerificationCase cylinder_case(const std::map<std::string, double>& p) {
  CylinderParams cp;
  cp.R = p.at("R");
  cp.C1 = p.at("C1");
  cp.C2 = p.at("C2");
  cp.z0 = p.at("z0");
  cp.z1 = p.at("z1");
  const double s = p.at("sign");
  if (s != 1.0 && s != -1.0) throw ConfigError("parameter 'sign' must be 1 or -1");
  cp.sign = static_cast<int>(s);
  const bool perturb = flag(p, "perturb");
  FamilyCase f;
  if (perturb) {
    const ScalarField wrong{Expr::parse("exp(2*z/R)"), {{"R", cp.R}}};
    f = build_family_case(cp, &wrong);
  } else {
    f = build_family_case(cp);
  }
  VerificationCase c;
  c.phi = f.phi;
  c.g = f.g;
  c.h = f.h;
  c.lambda_sq = f.lambda_sq;
  c.expectations = {{"tension", Verdict::Nonzero, 1e-3},
                    {"bitension", Verdict::Zero, 1e-7},
                    {"conformality", Verdict::Zero, 1e-12},
                    {"conformal_immersion", Verdict::Zero, 1e-7},
                    {"conformal_immersion_identity", Verdict::Zero, 1e-7},
                    {"r3_tangential", Verdict::Zero, 1e-8},
                    {"r3_normal", Verdict::Zero, 1e-8}};
  c.key_check = "bitension";
  return c;
}

inline VerificationCase wrap_case(const std::map<std::string, double>& p, int copies) {
  const double R = p.at("R");
  if (!(R > 0.0)) throw ParameterRejected("radius must be positive", R);
  const bool perturb = flag(p, "perturb");
  VerificationCase c;
  const ChartDomain dom = ChartDomain::boxed({"x", "y"}, {{-3.0, 3.0}, {-1.0, 1.0}});
  const Params par{{"R", R}};
  std::vector<std::string> comps;
  for (int k = 0; k < copies; ++k)
    for (const char* s : {"R*cos(x/R)", "R*sin(x/R)", "y"}) comps.push_back(s);
  c.phi = {dom, parse_all(comps), par};
  const Expr sigma = Expr::parse(perturb ? "exp(2*y/R)" : "exp(y/R)");
  c.g = RiemannianMetric::diagonal(dom, {sigma, sigma}, par);
  c.h = euclidean(3 * copies);
  c.lambda_sq = ScalarField{Expr::parse(copies == 1 ? (perturb ? "exp(-2*y/R)" : "exp(-y/R)")
                                                    : (perturb ? "2*exp(-2*y/R)" : "2*exp(-y/R)")),
                            par};
  c.expectations = {{"tension", Verdict::Nonzero, 1e-3},
                    {"bitension", Verdict::Zero, 1e-7},
                    {"w1", Verdict::Zero, 1e-12},
                    {"w3", Verdict::Zero, 1e-9},
                    {"holomorphy", Verdict::Nonzero, 0.1},
                    {"weierstrass_bitension", Verdict::Zero, 1e-7},
                    {"conformality", Verdict::Zero, 1e-12},
                    {"conformal_immersion", Verdict::Zero, 1e-7},
                    {"conformal_immersion_identity", Verdict::Zero, 1e-7}};
  if (copies == 1) {
    c.expectations.push_back({"r3_tangential", Verdict::Zero, 1e-8});
    c.expectations.push_back({"r3_normal", Verdict::Zero, 1e-8});
  }
  c.key_check = "w3";
  return c;
}

inline VerificationCase plane_inclusion(const std::map<std::string, double>& p) {
  const bool perturb = flag(p, "perturb");
  VerificationCase c;
  const ChartDomain dom = ChartDomain::boxed({"u", "v"}, {{-1.0, 1.0}, {-1.0, 1.0}});
  c.phi = {dom, parse_all({"u", "v", perturb ? "0.5*(u^2 + v^2)" : "0"}), {}};
  c.g = RiemannianMetric::euclidean(dom);
  c.h = euclidean(3);
  c.lambda_sq = ScalarField{Expr(1.0), {}};
  c.expectations = {{"tension", Verdict::Zero, 1e-7},
                    {"bitension", Verdict::Zero, 1e-7},
                    {"w1", Verdict::Zero, 1e-12},
                    {"w3", Verdict::Zero, 1e-9},
                    {"holomorphy", Verdict::Zero, 1e-10},
                    {"weierstrass_bitension", Verdict::Zero, 1e-7},
                    {"conformality", Verdict::Zero, 1e-12},
                    {"conformal_immersion", Verdict::Zero, 1e-7},
                    {"conformal_immersion_identity", Verdict::Zero, 1e-7},
                    {"r3_tangential", Verdict::Zero, 1e-8},
                    {"r3_normal", Verdict::Zero, 1e-8}};
  c.key_check = "tension";
  return c;
}

inline VerificationCase identity_case(const std::map<std::string, double>& p) {
  const double mv = p.at("m");
  if (mv != std::floor(mv) || mv < 1 || mv > 6) throw ConfigError("parameter 'm' must be an integer in 1..6");
  const int m = static_cast<int>(mv);
  const bool perturb = flag(p, "perturb");
  VerificationCase c;
  const ChartDomain dom = ChartDomain::boxed(names("x", m), std::vector<Interval>(m, {-1.0, 1.0}));
  std::vector<std::string> comps = names("x", m);
  if (perturb) comps[0] = "x1 + 0.3*x1^2";
  c.phi = {dom, parse_all(comps), {}};
  c.g = spherical_metric(dom);
  c.h = spherical_metric(ChartDomain::unbounded(names("y", m)));
  c.lambda_sq = ScalarField{Expr(1.0), {}};
  c.expectations = {{"tension", Verdict::Zero, 1e-7},
                    {"bitension", Verdict::Zero, 1e-7},
                    {"conformality", Verdict::Zero, 1e-12},
                    {"conformal_immersion", Verdict::Zero, 1e-7},
                    {"conformal_immersion_identity", Verdict::Zero, 1e-7}};
  c.key_check = "tension";
  return c;
}

}  // namespace detail

/// Builds a built-in case; `overrides` must name parameters the case declares.
inline VerificationCase build_case(const std::string& name, const std::map<std::string, double>& overrides = {}) {
  const CaseInfo* info = nullptr;
  for (const auto& c : catalog_cases())
    if (c.name == name) info = &c;
  if (!info) throw ConfigError("unknown case '" + name + "'");
  std::map<std::string, double> p = info->defaults;
  for (const auto& [k, v] : overrides) {
    if (!p.count(k)) throw ConfigError("case '" + name + "' has no parameter '" + k + "'");
    p[k] = v;
  }
  VerificationCase c;
  if (name == "h5_inclusion") c = detail::h5_inclusion(p);
  else if (name == "s5_stereographic") c = detail::s5_stereographic(p);
  else if (name == "cylinder_family") c = detail::cylinder_case(p);
  else if (name == "r2_wrap_r3") c = detail::wrap_case(p, 1);
  else if (name == "r2_wrap_r6") c = detail::wrap_case(p, 2);
  else if (name == "plane_inclusion") c = detail::plane_inclusion(p);
  else c = detail::identity_case(p);
  c.name = name;
  c.params = p;
  if (p.at("perturb") == 1.0) c.expectations = detail::perturbed_expectations(c);
  validate_case(c);
  return c;
}

}  // namespace bitension
