#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "bitension/geometry.hpp"
#include "bitension/sampling.hpp"

namespace fixtures {

using namespace bitension;

inline std::vector<std::string> names(const std::string& p, int n) {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back(p + std::to_string(i + 1));
  return out;
}

/// Upper half-space y_n^-2 delta.
inline RiemannianMetric hyperbolic(int n, const std::string& p = "y") {
  ChartDomain d = ChartDomain::unbounded(names(p, n));
  d.box[n - 1].lo = 0.0;
  d.excluded.push_back({n - 1, 0.0});
  return RiemannianMetric::diagonal(d, std::vector<Expr>(n, Expr::parse(p + std::to_string(n) + "^(-2)")));
}

/// Stereographic 4 delta / (1 + |y|^2)^2.
inline RiemannianMetric sphere(int n, const std::string& p = "y") {
  std::string r = "1";
  for (int i = 1; i <= n; ++i) r += " + " + p + std::to_string(i) + "^2";
  return RiemannianMetric::diagonal(ChartDomain::unbounded(names(p, n)),
                                    std::vector<Expr>(n, Expr::parse("4/(" + r + ")^2")));
}

inline RiemannianMetric euclidean(int n, const std::string& p = "y") {
  return RiemannianMetric::euclidean(ChartDomain::unbounded(names(p, n)));
}

/// (R cos theta, R sin theta, z) with the isometric metric R^2 dtheta^2 + dz^2.
struct CartesianCylinder {
  SmoothMap phi;
  RiemannianMetric g, h;
};

inline CartesianCylinder cartesian_cylinder(double R) {
  const ChartDomain dom = ChartDomain::boxed({"theta", "z"}, {{0.0, 2.0 * std::numbers::pi}, {-1.0, 1.0}});
  const Params p{{"R", R}};
  CartesianCylinder c;
  c.phi = {dom, {Expr::parse("R*cos(theta)"), Expr::parse("R*sin(theta)"), Expr::parse("z")}, p};
  c.g = RiemannianMetric::diagonal(dom, {Expr::parse("R^2"), Expr(1.0)}, p);
  c.h = euclidean(3);
  return c;
}

inline std::vector<double> random_vector(Rng& rng, int n, double lo = -1.0, double hi = 1.0) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(uniform(rng, lo, hi));
  return v;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, std::abs(a[k] - b[k]));
  return d;
}

}  // namespace fixtures
