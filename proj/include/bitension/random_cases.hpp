#pragma once

// Randomized geometries for the transformation-law checks: well-conditioned
// metrics, polynomial-plus-trigonometric maps, positive conformal factors and
// vector fields along the map, all as expressions.

#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

#include "bitension/conformal.hpp"
#include "bitension/sampling.hpp"

#include <Eigen/QR>

namespace bitension {

namespace detail {

inline std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return v < 0 ? "(" + std::string(buf) + ")" : std::string(buf);
}

inline std::string coord(const std::string& prefix, int i) { return prefix + std::to_string(i + 1); }

/// Smooth function with values in [-1, 1].
inline std::string bounded(Rng& rng, const std::string& p, int dim) {
  const std::string a = coord(p, uniform_int(rng, 0, dim - 1));
  const std::string b = coord(p, uniform_int(rng, 0, dim - 1));
  const std::string c = coord(p, uniform_int(rng, 0, dim - 1));
  const double k1 = uniform(rng, 0.5, 1.5), k2 = uniform(rng, 0.5, 1.5), s = uniform(rng, -3.14, 3.14);
  switch (uniform_int(rng, 0, 4)) {
    case 0: return "sin(" + num(k1) + "*" + a + " + " + num(s) + ")";
    case 1: return "cos(" + num(k1) + "*" + a + " + " + num(k2) + "*" + b + " + " + num(s) + ")";
    case 2: return "sin(" + num(k1) + "*" + a + ")*cos(" + num(k2) + "*" + b + " + " + num(s) + ")";
    case 3: return "sin(" + num(k1) + "*" + a + "*" + b + " + " + num(k2) + "*" + c + " + " + num(s) + ")";
    default: return "(2/(2 + cos(" + num(k1) + "*" + a + " + " + num(s) + ")) - 1)";
  }
}

/// Polynomial of degree at most 3 plus a trigonometric term.
inline std::string poly_trig(Rng& rng, const std::string& p, int dim) {
  std::string s = num(uniform(rng, -1.0, 1.0));
  for (int i = 0; i < dim; ++i) s += " + " + num(uniform(rng, -1.0, 1.0)) + "*" + coord(p, i);
  const int extra = uniform_int(rng, 1, 3);
  for (int t = 0; t < extra; ++t) {
    const std::string a = coord(p, uniform_int(rng, 0, dim - 1)), b = coord(p, uniform_int(rng, 0, dim - 1));
    switch (uniform_int(rng, 0, 2)) {
      case 0: s += " + " + num(uniform(rng, -0.5, 0.5)) + "*" + a + "*" + b; break;
      case 1: s += " + " + num(uniform(rng, -0.2, 0.2)) + "*" + a + "^3"; break;
      default: s += " + " + num(uniform(rng, -0.3, 0.3)) + "*" + a + "^2*" + b; break;
    }
  }
  s += " + " + num(uniform(rng, -0.4, 0.4)) + "*" + bounded(rng, p, dim);
  return s;
}

/// delta_ij + 0.2 b_ii on the diagonal, 0.2/dim b_ij off it: diagonally
/// dominant, hence positive definite everywhere.
inline RiemannianMetric random_metric(Rng& rng, const std::string& p, int dim) {
  std::vector<std::string> names;
  for (int i = 0; i < dim; ++i) names.push_back(coord(p, i));
  RiemannianMetric g{ChartDomain::unbounded(names), std::vector<Expr>(dim * dim), {}};
  for (int i = 0; i < dim; ++i)
    for (int j = i; j < dim; ++j) {
      const std::string e = i == j ? "1 + 0.2*" + bounded(rng, p, dim)
                                   : num(0.2 / dim) + "*" + bounded(rng, p, dim);
      g.components[i * dim + j] = g.components[j * dim + i] = Expr::parse(e);
    }
  return g;
}

}  // namespace detail

struct RandomCase {
  SmoothMap phi;
  RiemannianMetric g, h;
  ScalarField F;            // positive conformal factor
  VectorFieldAlongMap X;    // section along phi
  ScalarField f;            // auxiliary scalar function
  Point x;                  // evaluation point
};

inline RandomCase random_case(Rng& rng, int m, int n) {
  if (m < 1 || m > 5 || n < 1 || n > 6) throw Error("random cases support m in 1..5 and n in 1..6");
  RandomCase c;
  c.g = detail::random_metric(rng, "x", m);
  c.h = detail::random_metric(rng, "y", n);
  c.phi.domain = c.g.domain;
  for (int a = 0; a < n; ++a) c.phi.components.push_back(Expr::parse(detail::poly_trig(rng, "x", m)));
  c.F.expr = Expr::parse("exp(" + detail::num(uniform(rng, 0.1, 0.4)) + "*" + detail::bounded(rng, "x", m) + ")");
  for (int a = 0; a < n; ++a) c.X.components.push_back(Expr::parse(detail::poly_trig(rng, "x", m)));
  c.f.expr = Expr::parse(detail::poly_trig(rng, "x", m));
  for (int i = 0; i < m; ++i) c.x.push_back(uniform(rng, -1.0, 1.0));
  return c;
}

enum class Law { Tension, Jacobi, Bitension };

inline const char* law_name(Law l) {
  switch (l) {
    case Law::Tension: return "tension";
    case Law::Jacobi: return "jacobi";
    case Law::Bitension: return "bitension";
  }
  return "?";
}

/// ||a - b|| / max(||a||, ||b||, 1e-12)
inline double relative_discrepancy(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) d += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(d) / std::max({norm(a), norm(b), 1e-12});
}

struct LawComparison {
  std::vector<double> direct;  // computed with gbar = F^-2 g
  std::vector<double> rhs;     // g-side formula
  double discrepancy = 0.0;
};

inline LawComparison compare_law(Law law, const RandomCase& c) {
  const RiemannianMetric gbar = conformal_metric(c.g, c.F);
  LawComparison r;
  switch (law) {
    case Law::Tension:
      r.direct = tension_field(c.phi, gbar, c.h, c.x);
      r.rhs = tension_transform_rhs(c.phi, c.g, c.h, c.F, c.x);
      break;
    case Law::Jacobi:
      r.direct = jacobi_apply(c.phi, gbar, c.h, c.X, c.x);
      r.rhs = jacobi_transform_rhs(c.phi, c.g, c.h, c.F, c.X, c.x);
      break;
    case Law::Bitension:
      r.direct = bitension_field(c.phi, gbar, c.h, c.x);
      r.rhs = bitension_transform_rhs(c.phi, c.g, c.h, c.F, c.x);
      break;
  }
  r.discrepancy = relative_discrepancy(r.direct, r.rhs);
  return r;
}


struct RandomConformalImmersion {
  SmoothMap phi;       // (u, v) -> R^n
  RiemannianMetric g;  // sigma (du^2 + dv^2)
  RiemannianMetric h;  // Cartesian R^n
  Point x;
  bool biharmonic = false;  // known by construction
  std::string description;
};

/**
 * A wrap, catenoid or plane composed with a holomorphic reparametrization
 * w(z) and a rigid motion of R^3 into R^n. The domain density is
 * sigma0(w) |w'|^2, where sigma0 is either a density making the base map
 * biharmonic or a generic one; minimal bases are harmonic for every density.
 */
inline RandomConformalImmersion random_conformal_immersion(Rng& rng, int n) {
  if (n < 3 || n > 6) throw Error("conformal immersions are embedded into R^n with n in 3..6");
  using detail::num;
  RandomConformalImmersion c;
  std::string U, V, jac;
  if (uniform_int(rng, 0, 1) == 0) {
    const double r = uniform(rng, 0.5, 1.5), t = uniform(rng, -3.14, 3.14);
    const double ar = r * std::cos(t), ai = r * std::sin(t), br = uniform(rng, -1, 1), bi = uniform(rng, -0.5, 0.5);
    U = num(ar) + "*u - " + num(ai) + "*v + " + num(br);
    V = num(ai) + "*u + " + num(ar) + "*v + " + num(bi);
    jac = num(r * r);
    c.description = "affine";
  } else {
    const double r = uniform(rng, 0.05, 0.15), t = uniform(rng, -3.14, 3.14);
    const std::string cr = num(r * std::cos(t)), ci = num(r * std::sin(t));
    U = "u + " + cr + "*(u^2 - v^2) - " + ci + "*2*u*v";
    V = "v + " + cr + "*2*u*v + " + ci + "*(u^2 - v^2)";
    jac = "((1 + 2*(" + cr + "*u - " + ci + "*v))^2 + (2*(" + cr + "*v + " + ci + "*u))^2)";
    c.description = "quadratic";
  }
  const std::string X = "(" + U + ")", Y = "(" + V + ")";
  std::vector<std::string> base;
  std::string sigma0;
  switch (uniform_int(rng, 0, 3)) {
    case 0:
    case 1: {
      const double R = uniform(rng, 0.5, 2.0);
      const std::string Rs = num(R);
      base = {Rs + "*cos(" + X + "/" + Rs + ")", Rs + "*sin(" + X + "/" + Rs + ")", Y};
      const int kind = uniform_int(rng, 0, 3);
      if (kind == 0) sigma0 = "exp(" + Y + "/" + Rs + ")";
      else if (kind == 1) sigma0 = "exp(-" + Y + "/" + Rs + ")";
      else if (kind == 2) sigma0 = "exp(" + num(uniform(rng, 1.5, 3.0) / R) + "*" + Y + ")";
      else sigma0 = "(1 + 0.3*" + X + "^2)";
      c.biharmonic = kind <= 1;
      c.description += " wrap";
      break;
    }
    case 2:
      base = {"cosh_y*cos(" + X + ")", "cosh_y*sin(" + X + ")", Y};
      for (auto& b : base) {
        const auto at = b.find("cosh_y");
        if (at != std::string::npos) b.replace(at, 6, "((exp(" + Y + ") + exp(-" + Y + "))/2)");
      }
      sigma0 = "exp(" + num(uniform(rng, -0.4, 0.4)) + "*sin(" + X + ") + " + num(uniform(rng, -0.4, 0.4)) + "*" + Y + ")";
      c.biharmonic = true;
      c.description += " catenoid";
      break;
    default:
      base = {X, Y, "0"};
      sigma0 = "(2 + cos(" + num(uniform(rng, 0.5, 1.5)) + "*" + X + "))";
      c.biharmonic = true;
      c.description += " plane";
      break;
  }
  Eigen::MatrixXd M(n, 3);
  for (int a = 0; a < n; ++a)
    for (int j = 0; j < 3; ++j) M(a, j) = uniform(rng, -1.0, 1.0);
  const Eigen::MatrixXd Q = Eigen::HouseholderQR<Eigen::MatrixXd>(M).householderQ() * Eigen::MatrixXd::Identity(n, 3);
  const ChartDomain dom = ChartDomain::boxed({"u", "v"}, {{-1.0, 1.0}, {-1.0, 1.0}});
  c.phi.domain = dom;
  for (int a = 0; a < n; ++a) {
    std::string s = num(uniform(rng, -1.0, 1.0));
    for (int j = 0; j < 3; ++j) s += " + " + num(Q(a, j)) + "*(" + base[j] + ")";
    c.phi.components.push_back(Expr::parse(s));
  }
  const Expr sigma = Expr::parse(sigma0 + "*" + jac);
  c.g = RiemannianMetric::diagonal(dom, {sigma, sigma});
  std::vector<std::string> ys;
  for (int a = 0; a < n; ++a) ys.push_back(detail::coord("y", a));
  c.h = RiemannianMetric::euclidean(ChartDomain::unbounded(ys));
  c.x = {uniform(rng, -0.8, 0.8), uniform(rng, -0.8, 0.8)};
  return c;
}

}  // namespace bitension
