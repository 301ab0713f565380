#pragma once

// Conformal cylinder immersions phi(theta, z) = (R, theta, z) into
// cylindrical coordinates with g = lambda^-2 (R^2 dtheta^2 + dz^2), where
// lambda^2 solves y'' = y / R^2:
//   lambda^2 = (C2 e^{s z/R} - C1 C2^-1 R^2 e^{-s z/R}) / 2,  s = +-1.

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "bitension/geometry.hpp"

namespace bitension {

struct CylinderParams {
  double R = 1.0;
  double C1 = 0.0;
  double C2 = 2.0;
  int sign = 1;
  double z0 = 0.0;
  double z1 = 1.0;
};

inline void validate(const CylinderParams& p) {
  if (!(p.R > 0.0)) throw ParameterRejected("radius must be positive", p.R);
  if (p.C2 == 0.0) throw ParameterRejected("C2 must be nonzero", 0.0);
  if (p.sign != 1 && p.sign != -1) throw ParameterRejected("sign must be +1 or -1", p.sign);
  if (!(p.z0 < p.z1)) throw ParameterRejected("z range is empty", p.z0);
}

inline double lambda_sq_closed_form(const CylinderParams& p, double z) {
  if (p.C2 == 0.0) throw ParameterRejected("C2 must be nonzero", z);
  const double s = p.sign;
  return (p.C2 * std::exp(s * z / p.R) - p.C1 / p.C2 * p.R * p.R * std::exp(-s * z / p.R)) / 2.0;
}

/// The closed form as an expression in z with parameters R, C1, C2, s.
inline ScalarField lambda_sq_field(const CylinderParams& p) {
  return {Expr::parse("(C2*exp(s*z/R) - C1*R^2*exp(-s*z/R)/C2)/2"),
          {{"R", p.R}, {"C1", p.C1}, {"C2", p.C2}, {"s", static_cast<double>(p.sign)}}};
}

/// Throws ParameterRejected at the first grid point where lambda^2 <= 0.
inline void require_positive_lambda(const CylinderParams& p, int grid = 1024) {
  validate(p);
  for (int k = 0; k <= grid; ++k) {
    const double z = p.z0 + (p.z1 - p.z0) * k / grid;
    const double v = lambda_sq_closed_form(p, z);
    if (!(v > 0.0))
      throw ParameterRejected("lambda^2 = " + std::to_string(v) + " is not positive at z = " + std::to_string(z), z);
  }
}

struct OdeSolution {
  std::vector<double> z, y, dy;
  std::vector<double> closed;  // fitted closed form at each node
  std::vector<double> drift;   // |y'^2 - y^2/R^2 - C1|
  CylinderParams fitted;       // C1, C2, sign recovered from the initial data
  double max_deviation = 0.0;
  double max_drift = 0.0;
};

/// Constants of the closed form matching y(z0) = y0, y'(z0) = y0p. The first
/// integral gives C1 = y0p^2 - y0^2/R^2; the growing branch gives C2.
inline CylinderParams fit_closed_form(const CylinderParams& p, double y0, double y0p) {
  CylinderParams f = p;
  f.C1 = y0p * y0p - y0 * y0 / (p.R * p.R);
  auto c2_for = [&](int s) { return (y0 + s * p.R * y0p) * std::exp(-s * p.z0 / p.R); };
  f.C2 = c2_for(p.sign);
  if (std::abs(f.C2) < 1e-300) {
    f.sign = -p.sign;
    f.C2 = c2_for(f.sign);
  }
  return f;
}

/// Classical RK4 for y'' = y / R^2 over [z0, z1], compared with the closed form.
inline OdeSolution solve_ode(const CylinderParams& p, double y0, double y0p, int steps) {
  validate(p);
  if (steps < 16) throw Error("the ODE solve needs at least 16 steps");
  OdeSolution out;
  out.fitted = fit_closed_form(p, y0, y0p);
  const double R2 = p.R * p.R;
  const double hstep = (p.z1 - p.z0) / steps;
  auto rhs = [&](const std::array<double, 2>& u) { return std::array<double, 2>{u[1], u[0] / R2}; };
  std::array<double, 2> u{y0, y0p};
  for (int k = 0; k <= steps; ++k) {
    const double z = p.z0 + hstep * k;
    if (!(u[0] > 0.0)) {
      double at = z;
      if (k > 0) {
        const double prev = out.y.back();
        at = z - hstep * u[0] / (u[0] - prev);
      }
      throw ParameterRejected("lambda^2 crosses zero near z = " + std::to_string(at), at);
    }
    out.z.push_back(z);
    out.y.push_back(u[0]);
    out.dy.push_back(u[1]);
    const double c = lambda_sq_closed_form(out.fitted, z);
    out.closed.push_back(c);
    out.drift.push_back(std::abs(u[1] * u[1] - u[0] * u[0] / R2 - out.fitted.C1));
    out.max_deviation = std::max(out.max_deviation, std::abs(u[0] - c));
    out.max_drift = std::max(out.max_drift, out.drift.back());
    if (k == steps) break;
    const auto k1 = rhs(u);
    const auto k2 = rhs({u[0] + 0.5 * hstep * k1[0], u[1] + 0.5 * hstep * k1[1]});
    const auto k3 = rhs({u[0] + 0.5 * hstep * k2[0], u[1] + 0.5 * hstep * k2[1]});
    const auto k4 = rhs({u[0] + hstep * k3[0], u[1] + hstep * k3[1]});
    for (int i = 0; i < 2; ++i) u[i] += hstep / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return out;
}

/// Euclidean 3-space in cylindrical coordinates (rho, theta, z), rho > 0.
inline RiemannianMetric cylindrical_target() {
  ChartDomain d = ChartDomain::unbounded({"rho", "theta", "z"});
  d.box[0].lo = 0.0;
  d.excluded.push_back({0, 0.0});
  return RiemannianMetric::diagonal(std::move(d), {Expr(1.0), Expr::parse("rho^2"), Expr(1.0)});
}

struct FamilyCase {
  SmoothMap phi;
  RiemannianMetric g, h;
  ScalarField lambda_sq;
};

/// Map, conformally scaled domain metric and target metric for one member of
/// the family. `lambda_sq` may replace the closed form (used for controls).
inline FamilyCase build_family_case(const CylinderParams& p, const ScalarField* lambda_sq = nullptr) {
  FamilyCase c;
  if (lambda_sq) {
    validate(p);
    c.lambda_sq = *lambda_sq;
  } else {
    require_positive_lambda(p);
    c.lambda_sq = lambda_sq_field(p);
  }
  const ChartDomain dom = ChartDomain::boxed({"theta", "z"}, {{0.0, 2.0 * std::numbers::pi}, {p.z0, p.z1}});
  c.phi = SmoothMap{dom, {Expr::symbol("R"), Expr::symbol("theta"), Expr::symbol("z")}, c.lambda_sq.parameters};
  c.phi.parameters.insert_or_assign("R", p.R);
  const Expr L = c.lambda_sq.expr;
  c.g = RiemannianMetric::diagonal(dom, {pow(Expr::symbol("R"), Expr(2.0)) / L, Expr(1.0) / L}, c.phi.parameters);
  c.h = cylindrical_target();
  return c;
}

/// The isometric cylinder: same map with gbar = R^2 dtheta^2 + dz^2.
inline FamilyCase isometric_cylinder(double R, double z0 = 0.0, double z1 = 1.0) {
  FamilyCase c;
  const ChartDomain dom = ChartDomain::boxed({"theta", "z"}, {{0.0, 2.0 * std::numbers::pi}, {z0, z1}});
  const Params par{{"R", R}};
  c.phi = SmoothMap{dom, {Expr::symbol("R"), Expr::symbol("theta"), Expr::symbol("z")}, par};
  c.g = RiemannianMetric::diagonal(dom, {pow(Expr::symbol("R"), Expr(2.0)), Expr(1.0)}, par);
  c.h = cylindrical_target();
  c.lambda_sq = {Expr(1.0), {}};
  return c;
}

}  // namespace bitension
