#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "bitension/random_cases.hpp"
#include "bitension/weierstrass.hpp"
#include "fixtures.hpp"

using namespace bitension;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const ChartDomain kUV = ChartDomain::boxed({"u", "v"}, {{-3.0, 3.0}, {-1.0, 1.0}});

RiemannianMetric density(const std::string& sigma, Params p = {}) {
  const Expr s = Expr::parse(sigma);
  return RiemannianMetric::diagonal(kUV, {s, s}, std::move(p));
}

SmoothMap wrap(double R) {
  return {kUV, {Expr::parse("R*cos(u/R)"), Expr::parse("R*sin(u/R)"), Expr::symbol("v")}, {{"R", R}}};
}

}  // namespace

TEST_CASE("complex section of simple maps", "[weierstrass]") {
  const auto R3 = fixtures::euclidean(3);
  SECTION("plane: (1/2, -i/2, 0), conformal immersion, holomorphic") {
    const SmoothMap plane{kUV, {Expr::symbol("u"), Expr::symbol("v"), Expr(0.0)}, {}};
    const WSection w = w_section(plane, density("1"), R3, Point{0.3, 0.2});
    CHECK(w.phi[0].value() == std::complex<double>(0.5, 0.0));
    CHECK(w.phi[1].value() == std::complex<double>(0.0, -0.5));
    CHECK(w.phi[2].value() == std::complex<double>(0.0, 0.0));
    const W12 c = w1_w2_check(w);
    CHECK(c.conformal);
    CHECK(c.immersion);
    CHECK_THAT(c.w2, WithinAbs(0.5, 1e-15));
    CHECK(holomorphy_magnitude(w) == 0.0);
    CHECK_THAT(w.lambda_sq_induced, WithinAbs(1.0, 1e-15));
  }
  SECTION("(u, 2v, 0) has W1 = -3/4") {
    const SmoothMap stretch{kUV, {Expr::symbol("u"), Expr::parse("2*v"), Expr(0.0)}, {}};
    const WSection w = w_section(stretch, density("1"), R3, Point{0.0, 0.0});
    const W12 c = w1_w2_check(w);
    CHECK_THAT(c.w1.real(), WithinAbs(-0.75, 1e-15));
    CHECK_THAT(c.w1.imag(), WithinAbs(0.0, 1e-15));
    CHECK_FALSE(c.conformal);
    CHECK_THAT(w.conformality, WithinRel(0.6, 1e-14));
  }
  SECTION("a constant map is not an immersion") {
    const SmoothMap point{kUV, {Expr(1.0), Expr(2.0), Expr(3.0)}, {}};
    const W12 c = w1_w2_check(w_section(point, density("1"), R3, Point{0.0, 0.0}));
    CHECK(c.conformal);
    CHECK_FALSE(c.immersion);
  }
  SECTION("the section is linear in the map") {
    const SmoothMap a{kUV, {Expr::parse("u*v"), Expr::parse("sin(u)"), Expr::parse("v^3")}, {}};
    const SmoothMap b{kUV, {Expr::parse("exp(v)"), Expr::parse("u^2"), Expr::parse("cos(u*v)")}, {}};
    SmoothMap ab{kUV, {}, {}};
    for (int k = 0; k < 3; ++k) ab.components.push_back(a.components[k] + Expr(2.5) * b.components[k]);
    const Point x{0.4, -0.3};
    const auto g = density("1 + u^2");
    const WSection wa = w_section(a, g, R3, x), wb = w_section(b, g, R3, x), wab = w_section(ab, g, R3, x);
    for (int k = 0; k < 3; ++k) CHECK(std::abs(wab.phi[k].value() - wa.phi[k].value() - 2.5 * wb.phi[k].value()) < 1e-14);
  }
}

TEST_CASE("Wirtinger operators", "[weierstrass]") {
  const JetVec s = seed_point(Point{0.3, -0.7}, kJetOrder);
  JetBindings bind({"u", "v"}, s);
  const ComplexJet f{bind(Expr::parse("sin(u)*exp(v) + u^3*v"), {}), bind(Expr::parse("cos(u*v) - v^2"), {})};
  const auto a = dz(dzbar(f)).value(), b = dzbar(dz(f)).value();
  CHECK(std::abs(a - b) < 1e-14);
  // d/dz d/dzbar = Laplacian / 4
  const double lap_re = f.re.partial({2, 0}) + f.re.partial({0, 2});
  const double lap_im = f.im.partial({2, 0}) + f.im.partial({0, 2});
  CHECK_THAT(a.real(), WithinAbs(lap_re / 4, 1e-13));
  CHECK_THAT(a.imag(), WithinAbs(lap_im / 4, 1e-13));
  // z is holomorphic, zbar is not
  const ComplexJet z{s[0], s[1]};
  CHECK(std::abs(dzbar(z).value()) == 0.0);
  CHECK(dz(z).value() == std::complex<double>(1.0, 0.0));
  CHECK(dzbar(z.conj()).value() == std::complex<double>(1.0, 0.0));
}

TEST_CASE("wrap of the plane around a cylinder", "[weierstrass]") {
  const auto R3 = fixtures::euclidean(3);
  for (double R : {0.7, 1.5}) {
    const Params p{{"R", R}};
    const Point x{0.5, 0.25};
    SECTION("densities e^{+-v/R} are biharmonic") {
      for (const char* s : {"exp(v/R)", "exp(-v/R)"}) {
        const WSection w = w_section(wrap(R), density(s, p), R3, x);
        CHECK(w1_w2_check(w).conformal);
        for (const auto& r : w3_residual(w)) CHECK(std::abs(r) < 1e-12);
        CHECK(norm(bitension_field(wrap(R), density(s, p), R3, x)) < 1e-12);
      }
    }
    SECTION("|d phi / dzbar| = 1/(4R) and the map is not harmonic") {
      const WSection w = w_section(wrap(R), density("exp(v/R)", p), R3, x);
      CHECK_THAT(holomorphy_magnitude(w), WithinRel(0.25 / R, 1e-14));
    }
    SECTION("density e^{2v/R} is not biharmonic") {
      const WSection w = w_section(wrap(R), density("exp(2*v/R)", p), R3, x);
      double m = 0;
      for (const auto& r : w3_residual(w)) m = std::max(m, std::abs(r));
      CHECK(m > 1e-2);
    }
  }
}

TEST_CASE("complex formulas agree with the general engine on random conformal surfaces", "[weierstrass]") {
  Rng rng(99);
  int biharmonic = 0, other = 0;
  for (int k = 0; k < 40; ++k) {
    const auto c = random_conformal_immersion(rng, uniform_int(rng, 3, 6));
    INFO(c.description);
    const WSection w = w_section(c.phi, c.g, c.h, c.x);
    REQUIRE(w1_w2_check(w).conformal);
    REQUIRE(w1_w2_check(w).immersion);
    const auto t2 = bitension_field(c.phi, c.g, c.h, c.x);
    const auto tc = bitension_complex(w);
    std::vector<double> re;
    for (const auto& v : tc) {
      re.push_back(v.real());
      CHECK(std::abs(v.imag()) < 1e-10 * (1 + norm(t2)));
    }
    CHECK(fixtures::max_abs_diff(re, t2) < 1e-9 * (1 + norm(t2)));
    // |d phi_z / dzbar| = sigma |tau| / 4
    const auto tau = tension_field(c.phi, c.g, c.h, c.x);
    CHECK_THAT(holomorphy_magnitude(w), WithinAbs(w.sigma.value() * norm(tau) / 4, 1e-12 * (1 + norm(tau))));
    double w3 = 0;
    for (const auto& r : w3_residual(w)) w3 = std::max(w3, std::abs(r));
    if (c.biharmonic) {
      ++biharmonic;
      CHECK(w3 < 1e-10);
      CHECK(norm(t2) < 1e-9);
    } else {
      ++other;
      CHECK(w3 > 1e-4);
      CHECK(norm(t2) > 1e-3);
    }
  }
  CHECK(biharmonic > 0);
  CHECK(other > 0);
}

TEST_CASE("complex section rejects unsupported inputs", "[weierstrass]") {
  const auto R3 = fixtures::euclidean(3);
  const SmoothMap plane{kUV, {Expr::symbol("u"), Expr::symbol("v"), Expr(0.0)}, {}};
  CHECK_THROWS_AS(w_section(plane, RiemannianMetric::diagonal(kUV, {Expr(1.0), Expr(2.0)}), R3, Point{0.0, 0.0}),
                  GeometryError);
  CHECK_THROWS_AS(w_section(plane, density("1"), fixtures::sphere(3), Point{0.1, 0.1}), Error);
  CHECK_THROWS_AS(w_section(plane, density("1"), R3, Point{5.0, 0.0}), GeometryError);
  const auto g3 = fixtures::euclidean(3, "x");
  const SmoothMap id3{g3.domain, {Expr::symbol("x1"), Expr::symbol("x2"), Expr::symbol("x3")}, {}};
  CHECK_THROWS_AS(w_section(id3, g3, R3, Point{0.0, 0.0, 0.0}), Error);
}
