#pragma once

// Complex representation of maps from a surface with g = sigma (du^2 + dv^2)
// into flat R^n: the section phi^a = d phi^a/dz = (phi_u - i phi_v)/2, the
// conformality conditions on it, and the fourth-order biharmonic equation.

#include <complex>
#include <vector>

#include "bitension/geometry.hpp"

namespace bitension {

/// Complex-valued Taylor jet in (u, v), stored as real and imaginary parts.
struct ComplexJet {
  Jet re, im;

  std::complex<double> value() const { return {re.value(), im.value()}; }
  int order() const { return std::min(re.order(), im.order()); }

  friend ComplexJet operator+(const ComplexJet& a, const ComplexJet& b) { return {a.re + b.re, a.im + b.im}; }
  friend ComplexJet operator-(const ComplexJet& a, const ComplexJet& b) { return {a.re - b.re, a.im - b.im}; }
  friend ComplexJet operator*(const ComplexJet& a, const ComplexJet& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend ComplexJet operator*(const Jet& s, const ComplexJet& a) { return {s * a.re, s * a.im}; }
  friend ComplexJet operator*(double s, const ComplexJet& a) { return {s * a.re, s * a.im}; }
  ComplexJet conj() const { return {re, -im}; }
};

/// d/dz = (d/du - i d/dv)/2
inline ComplexJet dz(const ComplexJet& f) {
  return {0.5 * (derivative(f.re, 0) + derivative(f.im, 1)), 0.5 * (derivative(f.im, 0) - derivative(f.re, 1))};
}

/// d/dzbar = (d/du + i d/dv)/2
inline ComplexJet dzbar(const ComplexJet& f) {
  return {0.5 * (derivative(f.re, 0) - derivative(f.im, 1)), 0.5 * (derivative(f.im, 0) + derivative(f.re, 1))};
}

struct WSection {
  Point point;
  std::vector<ComplexJet> phi;   // d phi^a / dz
  Jet sigma;                     // g = sigma (du^2 + dv^2)
  double lambda_sq_induced = 0;  // <phi_u, phi_u>
  double conformality = 0;       // |2 W1| / (|phi_u|^2 + |phi_v|^2)
};

namespace detail {

inline void require_flat_cartesian(const RiemannianMetric& h, std::span<const double> y) {
  const MetricJets t = metric_jets(h, y, 1);
  const int n = t.dim;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const Jet& c = t.g[a * n + b];
      if (std::abs(c.value() - (a == b ? 1.0 : 0.0)) > 1e-13) throw Error("target metric must be the flat Cartesian metric");
      for (int k = 0; k < n; ++k)
        if (std::abs(c.gradient(k)) > 1e-13)
          throw Error("target metric must be the flat Cartesian metric");
    }
}

}  // namespace detail

/// Builds the complex section at x. The domain metric must be sigma(du^2 + dv^2)
/// and the target the Cartesian metric on R^n.
inline WSection w_section(const SmoothMap& phi, const RiemannianMetric& g, const RiemannianMetric& h,
                          std::span<const double> x) {
  if (phi.domain_dim() != 2) throw Error("the complex section needs a 2-dimensional domain");
  phi.domain.require(x, "evaluation point");
  PullbackGeometry geo(phi, g, h, x);
  detail::require_flat_cartesian(h, geo.image());
  const JetVec& gm = geo.domain_metric().g;
  const double scale = std::max(std::abs(gm[0].value()), std::abs(gm[3].value()));
  if (std::abs(gm[0].value() - gm[3].value()) > 1e-12 * scale || std::abs(gm[1].value()) > 1e-12 * scale)
    throw GeometryError("domain metric is not conformal to du^2 + dv^2", geo.point());
  WSection w;
  w.point = geo.point();
  w.sigma = gm[0];
  double uu = 0, vv = 0, uv = 0;
  for (int a = 0; a < geo.n(); ++a) {
    const Jet& pu = geo.dphi(0)[a];
    const Jet& pv = geo.dphi(1)[a];
    w.phi.push_back({0.5 * pu, -0.5 * pv});
    uu += pu.value() * pu.value();
    vv += pv.value() * pv.value();
    uv += pu.value() * pv.value();
  }
  w.lambda_sq_induced = uu;
  w.conformality = (uu + vv) > 0 ? std::hypot(uu - vv, 2.0 * uv) / (uu + vv) : 0.0;
  return w;
}

/// sum (phi^a)^2, which vanishes iff phi is weakly conformal.
inline std::complex<double> w1(const WSection& w) {
  std::complex<double> s = 0;
  for (const auto& p : w.phi) s += p.value() * p.value();
  return s;
}

/// sum |phi^a|^2, positive iff phi is an immersion (given w1 = 0).
inline double w2(const WSection& w) {
  double s = 0;
  for (const auto& p : w.phi) s += std::norm(p.value());
  return s;
}

struct W12 {
  std::complex<double> w1;
  double w2 = 0;
  bool conformal = false;
  bool immersion = false;
};

inline W12 w1_w2_check(const WSection& w, double tol = 1e-12) {
  W12 r{w1(w), w2(w)};
  r.conformal = std::abs(r.w1) <= tol * std::max(1.0, r.w2);
  r.immersion = r.w2 > tol;
  return r;
}

/// d/dzbar d/dz (sigma^-1 d phi^a/dzbar) per component; zero iff phi is
/// biharmonic.
inline std::vector<std::complex<double>> w3_residual(const WSection& w) {
  const Jet inv = 1.0 / w.sigma;
  std::vector<std::complex<double>> out;
  for (const auto& p : w.phi) out.push_back(dzbar(dz(inv * dzbar(p))).value());
  return out;
}

/// tau2 = 4 sigma^-1 d/dzbar d/dz (4 sigma^-1 d phi^a/dzbar); the imaginary
/// parts vanish and the real parts are the bitension field.
inline std::vector<std::complex<double>> bitension_complex(const WSection& w) {
  const Jet inv = 1.0 / w.sigma;
  std::vector<std::complex<double>> out;
  for (const auto& p : w.phi) {
    const ComplexJet tau = 4.0 * (inv * dzbar(p));
    out.push_back((4.0 * (inv * dzbar(dz(tau)))).value());
  }
  return out;
}

/// sqrt(sum |d phi^a/dzbar|^2); zero iff phi is harmonic.
inline double holomorphy_magnitude(const WSection& w) {
  double s = 0;
  for (const auto& p : w.phi) s += std::norm(dzbar(p).value());
  return std::sqrt(s);
}

}  // namespace bitension
