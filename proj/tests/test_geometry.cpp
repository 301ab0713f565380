#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "bitension/geometry.hpp"
#include "bitension/random_cases.hpp"
#include "fd_oracle.hpp"
#include "fixtures.hpp"

using namespace bitension;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

double gamma_at(const PointEvaluation& e, int m, int k, int i, int j) { return e.components[(k * m + i) * m + j]; }

double inner(const RiemannianMetric& h, const Point& y, const std::vector<double>& a, const std::vector<double>& b) {
  const Eigen::MatrixXd H = metric_values(h, y);
  const Eigen::Map<const Eigen::VectorXd> u(a.data(), a.size()), v(b.data(), b.size());
  return u.dot(H * v);
}

}  // namespace

TEST_CASE("sample points stay in the shrunk box, avoid excluded loci and are reproducible", "[sampling]") {
  ChartDomain d = ChartDomain::boxed({"a", "b"}, {{0.0, 1.0}, {-2.0, 2.0}});
  d.excluded.push_back({1, 0.0});
  const auto p1 = d.sample(200, 9);
  const auto p2 = d.sample(200, 9);
  REQUIRE(p1.size() == 200);
  CHECK(p1 == p2);
  CHECK(d.sample(200, 10) != p1);
  for (const auto& x : p1) {
    CHECK(x[0] >= 0.05);
    CHECK(x[0] <= 0.95);
    CHECK(x[1] >= -1.8);
    CHECK(x[1] <= 1.8);
    CHECK(std::abs(x[1]) > 1e-3);
  }
}

TEST_CASE("Christoffel symbols match closed forms", "[geometry]") {
  SECTION("Euclidean metric has none") {
    const auto e = christoffel(fixtures::euclidean(3), Point{0.3, -1.0, 2.0});
    for (double c : e.components) CHECK(c == 0.0);
  }
  SECTION("hyperbolic plane y^-2 (dx^2 + dy^2)") {
    const double y = 0.7;
    const auto e = christoffel(fixtures::hyperbolic(2), Point{0.4, y});
    CHECK_THAT(gamma_at(e, 2, 0, 0, 1), WithinAbs(-1.0 / y, 1e-14));
    CHECK_THAT(gamma_at(e, 2, 0, 1, 0), WithinAbs(-1.0 / y, 1e-14));
    CHECK_THAT(gamma_at(e, 2, 1, 0, 0), WithinAbs(1.0 / y, 1e-14));
    CHECK_THAT(gamma_at(e, 2, 1, 1, 1), WithinAbs(-1.0 / y, 1e-14));
    CHECK_THAT(gamma_at(e, 2, 0, 0, 0), WithinAbs(0.0, 1e-14));
    CHECK_THAT(gamma_at(e, 2, 1, 0, 1), WithinAbs(0.0, 1e-14));
  }
  SECTION("cylindrical coordinates on R^3") {
    const RiemannianMetric h = RiemannianMetric::diagonal(ChartDomain::unbounded({"rho", "theta", "z"}),
                                                          {Expr(1.0), Expr::parse("rho^2"), Expr(1.0)});
    const double rho = 1.7;
    const auto e = christoffel(h, Point{rho, 0.2, 0.1});
    CHECK_THAT(gamma_at(e, 3, 0, 1, 1), WithinAbs(-rho, 1e-14));
    CHECK_THAT(gamma_at(e, 3, 1, 0, 1), WithinAbs(1.0 / rho, 1e-14));
    CHECK_THAT(gamma_at(e, 3, 1, 1, 0), WithinAbs(1.0 / rho, 1e-14));
    CHECK_THAT(gamma_at(e, 3, 2, 2, 2), WithinAbs(0.0, 1e-14));
  }
}

TEST_CASE("constant curvature: R(X,Y)Z = K(<Y,Z>X - <X,Z>Y)", "[geometry]") {
  Rng rng(21);
  for (auto [metric, K, lo] : {std::tuple{fixtures::hyperbolic(3), -1.0, 0.3}, std::tuple{fixtures::sphere(3), 1.0, -1.5}}) {
    for (int k = 0; k < 32; ++k) {
      Point y = fixtures::random_vector(rng, 3, -1.5, 1.5);
      if (K < 0) y[2] = uniform(rng, lo, 2.0);
      const auto X = fixtures::random_vector(rng, 3), Y = fixtures::random_vector(rng, 3),
                 Z = fixtures::random_vector(rng, 3);
      const auto R = curvature_apply(metric, y, X, Y, Z);
      const double yz = inner(metric, y, Y, Z), xz = inner(metric, y, X, Z);
      for (int a = 0; a < 3; ++a) CHECK_THAT(R[a], WithinAbs(K * (yz * X[a] - xz * Y[a]), 1e-10 * (1 + std::abs(R[a]))));
    }
  }
}

TEST_CASE("metric compatibility and first Bianchi identity", "[geometry]") {
  Rng rng(4);
  std::vector<RiemannianMetric> metrics = {fixtures::hyperbolic(4), fixtures::sphere(5)};
  for (int k = 0; k < 4; ++k) metrics.push_back(detail::random_metric(rng, "y", 2 + k));
  for (const auto& g : metrics) {
    const int m = g.dim();
    for (int s = 0; s < 8; ++s) {
      Point x = fixtures::random_vector(rng, m);
      if (g.domain.box[m - 1].lo == 0.0) x[m - 1] = uniform(rng, 0.5, 2.0);
      const MetricJets mj = metric_jets(g, x, 2);
      for (int kk = 0; kk < m; ++kk)
        for (int i = 0; i < m; ++i)
          for (int j = 0; j < m; ++j) {
            double r = mj.g[i * m + j].gradient(kk);
            for (int l = 0; l < m; ++l)
              r -= mj.christoffel(l, kk, i) * mj.g[l * m + j].value() + mj.christoffel(l, kk, j) * mj.g[i * m + l].value();
            CHECK(std::abs(r) < 1e-10);
          }
      const auto R = mj.riemann();
      auto at = [&](int l, int a, int b, int c) { return R[((l * m + a) * m + b) * m + c]; };
      for (int l = 0; l < m; ++l)
        for (int a = 0; a < m; ++a)
          for (int b = 0; b < m; ++b)
            for (int c = 0; c < m; ++c) CHECK(std::abs(at(l, a, b, c) + at(l, b, c, a) + at(l, c, a, b)) < 1e-9);
    }
  }
}

TEST_CASE("metric errors", "[geometry]") {
  const RiemannianMetric bad = RiemannianMetric::diagonal(ChartDomain::unbounded({"a", "b"}), {Expr(1.0), Expr(-1.0)});
  CHECK_THROWS_AS(christoffel(bad, Point{0.0, 0.0}), GeometryError);
  const RiemannianMetric asym{ChartDomain::unbounded({"a", "b"}),
                              {Expr(1.0), Expr::parse("a"), Expr(0.0), Expr(1.0)}, {}};
  CHECK_THROWS_AS(christoffel(asym, Point{0.5, 0.0}), Error);
  CHECK_THROWS_AS(christoffel(fixtures::hyperbolic(2), Point{0.0, -1.0}), GeometryError);
}

TEST_CASE("gradient and Laplacian", "[geometry]") {
  SECTION("flat plane") {
    const auto r = grad_and_laplacian({Expr::parse("a^2 + b^2"), {}}, RiemannianMetric::euclidean(ChartDomain::unbounded({"a", "b"})),
                                      Point{0.3, -0.4});
    CHECK_THAT(r.gradient[0], WithinAbs(0.6, 1e-15));
    CHECK_THAT(r.gradient[1], WithinAbs(-0.8, 1e-15));
    CHECK_THAT(r.laplacian, WithinAbs(4.0, 1e-14));
  }
  SECTION("hyperbolic plane: Laplacian of ln y is -1") {
    const auto r = grad_and_laplacian({Expr::parse("ln(y2)"), {}}, fixtures::hyperbolic(2), Point{0.1, 0.8});
    CHECK_THAT(r.laplacian, WithinAbs(-1.0, 1e-14));
    CHECK_THAT(r.gradient[1], WithinAbs(0.8, 1e-14));
  }
  SECTION("two-dimensional rescaling: Laplacian of lambda^2 g is lambda^-2 times that of g") {
    Rng rng(8);
    for (int k = 0; k < 20; ++k) {
      const RiemannianMetric g = detail::random_metric(rng, "x", 2);
      const ScalarField u{Expr::parse(detail::poly_trig(rng, "x", 2)), {}};
      const Expr l2 = Expr::parse("exp(" + detail::bounded(rng, "x", 2) + ")");
      const Point x = fixtures::random_vector(rng, 2);
      const double lam2 = evaluate(l2, EvalContext<double>{{{"x1", x[0]}, {"x2", x[1]}}});
      const double direct = grad_and_laplacian(u, g.scaled(l2), x).laplacian;
      const double base = grad_and_laplacian(u, g, x).laplacian;
      CHECK_THAT(direct, WithinAbs(base / lam2, 1e-10 * (1 + std::abs(direct))));
    }
  }
}

TEST_CASE("pullback metric and conformality", "[geometry]") {
  SECTION("cylinder in cylindrical coordinates pulls back to R^2 dtheta^2 + dz^2") {
    const RiemannianMetric h = RiemannianMetric::diagonal(ChartDomain::unbounded({"rho", "theta", "z"}),
                                                          {Expr(1.0), Expr::parse("rho^2"), Expr(1.0)});
    const SmoothMap phi{ChartDomain::unbounded({"t", "s"}), {Expr(1.5), Expr::symbol("t"), Expr::symbol("s")}, {}};
    const Eigen::MatrixXd p = pullback_metric(phi, h, Point{0.4, 0.2});
    CHECK_THAT(p(0, 0), WithinAbs(2.25, 1e-15));
    CHECK_THAT(p(1, 1), WithinAbs(1.0, 1e-15));
    CHECK_THAT(p(0, 1), WithinAbs(0.0, 1e-15));
  }
  SECTION("identity pulls back the target metric") {
    const RiemannianMetric h = fixtures::sphere(3, "x");
    const SmoothMap id{h.domain, {Expr::symbol("x1"), Expr::symbol("x2"), Expr::symbol("x3")}, {}};
    const Point x{0.2, -0.5, 0.9};
    CHECK((pullback_metric(id, h, x) - metric_values(h, x)).norm() < 1e-15);
  }
  SECTION("stereographic inclusion is conformal with lambda^2 = 4/(1+|u|^2)^2") {
    const SmoothMap phi{ChartDomain::unbounded(fixtures::names("u", 4)),
                        {Expr::symbol("u1"), Expr::symbol("u2"), Expr::symbol("u3"), Expr::symbol("u4"), Expr(0.0)},
                        {}};
    const Point u{0.1, 0.2, -0.3, 0.4};
    const auto r = conformality_factor(phi, RiemannianMetric::euclidean(phi.domain), fixtures::sphere(5), u, 1e-12);
    CHECK(r.conformal);
    CHECK(r.immersion);
    CHECK_THAT(r.lambda_sq, WithinRel(4.0 / std::pow(1.3, 2), 1e-14));
  }
  SECTION("(u, 2v, 0) is an immersion but not conformal") {
    const SmoothMap phi{ChartDomain::unbounded({"u", "v"}), {Expr::symbol("u"), Expr::parse("2*v"), Expr(0.0)}, {}};
    const auto r = conformality_factor(phi, RiemannianMetric::euclidean(phi.domain), fixtures::euclidean(3),
                                       Point{0.0, 0.0}, 1e-8);
    CHECK(r.immersion);
    CHECK_FALSE(r.conformal);
    CHECK(r.deviation > 0.5);
  }
}

TEST_CASE("tension field", "[geometry]") {
  SECTION("identity maps are harmonic for any metric") {
    Rng rng(3);
    for (int k = 0; k < 5; ++k) {
      Rng twin = rng;
      const RiemannianMetric g = detail::random_metric(rng, "x", 3);
      const RiemannianMetric h = detail::random_metric(twin, "y", 3);
      const SmoothMap id{g.domain, {Expr::symbol("x1"), Expr::symbol("x2"), Expr::symbol("x3")}, {}};
      CHECK(norm(tension_field(id, g, h, fixtures::random_vector(rng, 3))) < 1e-12);
    }
  }
  SECTION("isometric cylinder in Cartesian coordinates: tau = -(1/R) radial, matching a difference oracle") {
    const double R = 1.7;
    const auto c = fixtures::cartesian_cylinder(R);
    const Point x{0.9, 0.3};
    const auto tau = tension_field(c.phi, c.g, c.h, x);
    CHECK_THAT(tau[0], WithinAbs(-std::cos(0.9) / R, 1e-14));
    CHECK_THAT(tau[1], WithinAbs(-std::sin(0.9) / R, 1e-14));
    CHECK_THAT(tau[2], WithinAbs(0.0, 1e-14));
    // flat target: tau^a = R^-2 d_theta^2 phi^a + d_z^2 phi^a
    for (int a = 0; a < 3; ++a) {
      auto f = [&](const std::vector<long double>& p) {
        EvalContext<double> ctx{{{"theta", static_cast<double>(p[0])}, {"z", static_cast<double>(p[1])}}, &c.phi.parameters};
        return static_cast<long double>(evaluate(c.phi.components[a], ctx));
      };
      MultiIndex tt{}, zz{};
      tt[0] = 2;
      zz[1] = 2;
      const double fd = oracle::fd_partial_extrapolated(f, x, tt, 1e-2) / (R * R) +
                        oracle::fd_partial_extrapolated(f, x, zz, 1e-2);
      CHECK_THAT(tau[a], WithinAbs(fd, 1e-8));
    }
  }
}

TEST_CASE("Jacobi operator product rule J(fX) = f J(X) - (Delta f) X - 2 nabla_{grad f} X", "[geometry]") {
  Rng rng(17);
  for (int k = 0; k < 20; ++k) {
    const int m = uniform_int(rng, 2, 4), n = uniform_int(rng, 2, 4);
    const RandomCase c = random_case(rng, m, n);
    PullbackGeometry geo(c.phi, c.g, c.h, c.x);
    const Jet f = geo.scalar(c.f);
    const JetVec X = geo.field(c.X);
    JetVec fX;
    for (const auto& v : X) fX.push_back(f * v);
    const auto lhs = values(geo.jacobi(fX));
    const auto JX = values(geo.jacobi(X));
    const double lap = geo.laplacian(f).value();
    const auto nab = values(geo.covariant_along(X, geo.gradient(f)));
    std::vector<double> rhs(n);
    for (int a = 0; a < n; ++a) rhs[a] = f.value() * JX[a] - lap * X[a].value() - 2.0 * nab[a];
    CHECK(relative_discrepancy(lhs, rhs) < 1e-10);
  }
}

TEST_CASE("terms of the conformal-change condition for the H^5 inclusion", "[geometry]") {
  // phi = (1, x1..x4), flat domain, h = y5^-2 delta, section dphi(d4) = d/dy5
  const ChartDomain dom = ChartDomain::unbounded(fixtures::names("x", 4));
  const SmoothMap phi{dom, {Expr(1.0), Expr::symbol("x1"), Expr::symbol("x2"), Expr::symbol("x3"), Expr::symbol("x4")}, {}};
  const RiemannianMetric g = RiemannianMetric::euclidean(dom);
  const RiemannianMetric h = fixtures::hyperbolic(5);
  const Point x{0.3, -0.2, 1.1, 0.8};
  const double x4 = x[3];
  PullbackGeometry geo(phi, g, h, x);
  const JetVec d4 = geo.dphi(3);
  const Jet inv = geo.scalar(Expr::parse("1/x4"), {});
  const auto J = values(geo.jacobi(d4));
  const double t1 = -(1.0 / x4) * J[4];
  const double t2 = geo.laplacian(inv).value() * d4[4].value();
  const double t3 = 2.0 * values(geo.covariant_along(d4, geo.gradient(inv)))[4];
  CHECK_THAT(t1, WithinRel(-4.0 / std::pow(x4, 3), 1e-13));
  CHECK_THAT(t2, WithinRel(2.0 / std::pow(x4, 3), 1e-13));
  CHECK_THAT(t3, WithinRel(2.0 / std::pow(x4, 3), 1e-13));
  for (int a = 0; a < 4; ++a) CHECK(std::abs(J[a]) < 1e-13);
}

TEST_CASE("bitension field", "[geometry]") {
  SECTION("harmonic maps have zero bitension") {
    const SmoothMap plane{ChartDomain::unbounded({"u", "v"}), {Expr::symbol("u"), Expr::symbol("v"), Expr(0.0)}, {}};
    CHECK(norm(bitension_field(plane, RiemannianMetric::euclidean(plane.domain), fixtures::euclidean(3), Point{0.2, 0.1})) == 0.0);
    const RiemannianMetric s = fixtures::sphere(3, "x");
    const SmoothMap id{s.domain, {Expr::symbol("x1"), Expr::symbol("x2"), Expr::symbol("x3")}, {}};
    CHECK(norm(bitension_field(id, s, fixtures::sphere(3), Point{0.4, -0.1, 0.3})) < 1e-12);
  }
  SECTION("isometric cylinder in Cartesian coordinates: tau2 = (1/R^3) radial") {
    // tau = -(1/R)(cos, sin, 0); the flat-target Laplacian R^-2 d_theta^2 gives (1/R^3)(cos, sin, 0)
    const double R = 0.8;
    const auto c = fixtures::cartesian_cylinder(R);
    const auto b = bitension_field(c.phi, c.g, c.h, Point{2.1, -0.4});
    CHECK_THAT(b[0], WithinAbs(std::cos(2.1) / std::pow(R, 3), 1e-12));
    CHECK_THAT(b[1], WithinAbs(std::sin(2.1) / std::pow(R, 3), 1e-12));
    CHECK_THAT(b[2], WithinAbs(0.0, 1e-12));
  }
}

TEST_CASE("bienergy of the isometric cylinder", "[geometry][integral]") {
  for (double R : {1.0, 2.0}) {
    const auto c = fixtures::cartesian_cylinder(R);
    const std::vector<Interval> region{{0.0, 2.0 * std::numbers::pi}, {0.0, 1.0}};
    const double e8 = bienergy(c.phi, c.g, c.h, region, 8);
    const double e16 = bienergy(c.phi, c.g, c.h, region, 16);
    CHECK_THAT(e16, WithinRel(std::numbers::pi / R, 1e-12));
    CHECK(std::abs(e16 - e8) < 1e-10);
  }
  const auto c = fixtures::cartesian_cylinder(1.0);
  CHECK_THROWS_AS(bienergy(c.phi, c.g, c.h, {{0.0, 7.0}, {0.0, 1.0}}, 4), GeometryError);
}

TEST_CASE("first variation of the bienergy matches the bitension pairing", "[geometry][integral]") {
  const ChartDomain dom = ChartDomain::boxed({"x", "y"}, {{0.0, 1.0}, {0.0, 1.0}});
  const SmoothMap phi{dom, {Expr::parse("x^4"), Expr::symbol("y")}, {}};
  const RiemannianMetric g = RiemannianMetric::euclidean(dom);
  const RiemannianMetric h = fixtures::sphere(2);
  const Expr bump = Expr::parse("(x*(1 - x)*y*(1 - y))^2");
  const VectorFieldAlongMap V{{bump * Expr::parse("1 + y"), bump * Expr::parse("x - 2")}, {}};
  const auto fv = first_variation_check(phi, V, g, h, {{0.0, 1.0}, {0.0, 1.0}}, 1e-3, 12);
  CHECK(std::abs(fv.pairing) > 1e-3);
  CHECK_THAT(fv.slope, WithinRel(fv.pairing, 1e-4));
}
