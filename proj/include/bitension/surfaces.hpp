#pragma once

// Extrinsic geometry of surfaces in a 3-dimensional chart (Cartesian or
// curvilinear; inner products always go through the target metric), Chen's
// bitension formula for isometric immersions, and the biharmonicity system for
// conformal surface immersions.

#include <array>
#include <vector>

#include "bitension/geometry.hpp"

namespace bitension {

/// Surface quantities as jets at one point. The shape operator is stored as
/// shape[j*2 + i] = A^j_i, so (A v)^j = A^j_i v^i in the coordinate frame.
struct SurfaceGeometry {
  JetVec xi;     // unit normal, target frame
  JetVec shape;  // A^j_i w.r.t. the isometric metric gbar
  Jet H;         // mean curvature, H = tr(A)/2
  Jet B2;        // |B|^2 measured with gbar, = tr(A^2)
  JetVec eta;    // H xi

  JetVec apply_shape(const JetVec& v) const {
    return {shape[0] * v[0] + shape[1] * v[1], shape[2] * v[0] + shape[3] * v[1]};
  }
};

/**
 * Normal from the h-raised cross product of the coordinate tangents, so that
 * (d_1, d_2, xi) is positively oriented in the target chart. The isometric
 * metric is gbar = scale * (domain metric of geo); scale defaults to 1.
 */
inline SurfaceGeometry surface_data(const PullbackGeometry& geo, const Jet* scale = nullptr) {
  if (geo.m() != 2 || geo.n() != 3) throw Error("surface data needs a map from a 2-dimensional into a 3-dimensional chart");
  const JetVec& T1 = geo.dphi(0);
  const JetVec& T2 = geo.dphi(1);
  const JetVec& h = geo.target_metric();
  auto H3 = [&](int a, int b) -> const Jet& { return h[a * 3 + b]; };
  const Jet det = H3(0, 0) * (H3(1, 1) * H3(2, 2) - H3(1, 2) * H3(2, 1)) -
                  H3(0, 1) * (H3(1, 0) * H3(2, 2) - H3(1, 2) * H3(2, 0)) +
                  H3(0, 2) * (H3(1, 0) * H3(2, 1) - H3(1, 1) * H3(2, 0));
  const Jet vol = sqrt(det);
  const JetVec N = {vol * (T1[1] * T2[2] - T1[2] * T2[1]), vol * (T1[2] * T2[0] - T1[0] * T2[2]),
                    vol * (T1[0] * T2[1] - T1[1] * T2[0])};
  const JetVec hinv = inverse_spd(h, 3, geo.point());
  JetVec xi = geo.zeros(3, kJetOrder);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) xi[a] += hinv[a * 3 + b] * N[b];
  const Jet len2 = geo.target_inner(xi, xi);
  const double tangent_scale = geo.target_inner(T1, T1).value() * geo.target_inner(T2, T2).value();
  if (!(len2.value() > 1e-24 * tangent_scale) || tangent_scale == 0.0)
    throw GeometryError("immersion is degenerate (rank < 2)", geo.point());
  const Jet inv_len = 1.0 / sqrt(len2);
  for (auto& c : xi) c = c * inv_len;

  SurfaceGeometry s;
  s.xi = xi;
  // S_ik = <-nabla_i xi, T_k>
  std::array<Jet, 4> S;
  for (int i = 0; i < 2; ++i) {
    JetVec d = geo.covariant(xi, i);
    for (auto& c : d) c = -c;
    for (int k = 0; k < 2; ++k) S[i * 2 + k] = geo.target_inner(d, geo.dphi(k));
  }
  const JetVec& ginv = geo.domain_metric().ginv;
  s.shape = geo.zeros(4, kJetOrder);
  for (int j = 0; j < 2; ++j)
    for (int i = 0; i < 2; ++i)
      for (int k = 0; k < 2; ++k) s.shape[j * 2 + i] += ginv[j * 2 + k] * S[i * 2 + k];
  if (scale)
    for (auto& a : s.shape) a = a / *scale;
  s.H = 0.5 * (s.shape[0] + s.shape[3]);
  s.B2 = s.shape[0] * s.shape[0] + s.shape[1] * s.shape[2] + s.shape[2] * s.shape[1] + s.shape[3] * s.shape[3];
  for (const auto& c : xi) s.eta.push_back(s.H * c);
  return s;
}

/// Chen's formula for an isometric surface immersion, evaluated with the
/// domain metric of geo as gbar:
///   tau2 = 2(Delta H - H|B|^2) xi - 2 dphi(2 A(grad H) + grad(H^2))
inline std::vector<double> chen_bitension(const PullbackGeometry& geo, const SurfaceGeometry& s) {
  const double lapH = geo.laplacian(s.H).value();
  const JetVec gH = geo.gradient(s.H);
  const JetVec gH2 = geo.gradient(s.H * s.H);
  const JetVec AgH = s.apply_shape(gH);
  const JetVec tangent = {2.0 * AgH[0] + gH2[0], 2.0 * AgH[1] + gH2[1]};
  const JetVec push = geo.push_forward(tangent);
  const double c = 2.0 * (lapH - s.H.value() * s.B2.value());
  std::vector<double> out(3);
  for (int a = 0; a < 3; ++a) out[a] = c * s.xi[a].value() - 2.0 * push[a].value();
  return out;
}

struct R3Residual {
  std::array<double, 2> tangential{};  // domain coordinate components
  double normal = 0.0;
};

/**
 * Biharmonicity system for a conformal immersion phi*h = lambda^2 g of a
 * surface, all operators w.r.t. g; |B|^2 is taken w.r.t. g, i.e.
 * lambda^2 |B|^2_gbar:
 *   A(grad H) + grad(H^2)/2 + 2H A(grad ln lambda)
 *   Delta H - H|B|^2 + 2H(Delta ln lambda + 2|grad ln lambda|^2) + 4 g(grad ln lambda, grad H)
 */
inline R3Residual r3_system_residual(const SmoothMap& phi, const RiemannianMetric& g, const RiemannianMetric& h,
                                     const ScalarField& lambda_sq, std::span<const double> x) {
  PullbackGeometry geo(phi, g, h, x);
  const Jet l2 = geo.scalar(lambda_sq);
  if (!(l2.value() > 0.0)) throw GeometryError("conformal factor is not positive", geo.point());
  const SurfaceGeometry s = surface_data(geo, &l2);
  const Jet lnl = 0.5 * log(l2);
  const JetVec gl = geo.gradient(lnl);
  const JetVec gH = geo.gradient(s.H);
  const JetVec gH2 = geo.gradient(s.H * s.H);
  const JetVec AgH = s.apply_shape(gH);
  const JetVec Agl = s.apply_shape(gl);
  R3Residual r;
  const double H = s.H.value();
  for (int i = 0; i < 2; ++i) r.tangential[i] = AgH[i].value() + 0.5 * gH2[i].value() + 2.0 * H * Agl[i].value();
  r.normal = geo.laplacian(s.H).value() - l2.value() * H * s.B2.value() +
             2.0 * H * (geo.laplacian(lnl).value() + 2.0 * geo.domain_inner(gl, gl).value()) +
             4.0 * geo.domain_inner(gl, gH).value();
  return r;
}

struct NormalDerivative {
  std::vector<double> direct;      // nabla_Y (H xi)
  std::vector<double> normal;      // Y(H) xi
  std::vector<double> tangential;  // -H dphi(A Y)
  std::vector<double> residual;    // direct - normal - tangential
};

/// Weingarten decomposition of nabla_Y (H xi) for a surface in a flat target.
inline NormalDerivative normal_field_covariant_derivative(const PullbackGeometry& geo, const SurfaceGeometry& s,
                                                          const JetVec& Y) {
  NormalDerivative out;
  out.direct = values(geo.covariant_along(s.eta, Y));
  const double YH = geo.domain_inner(geo.gradient(s.H), Y).value();
  const JetVec push = geo.push_forward(s.apply_shape(Y));
  for (int a = 0; a < 3; ++a) {
    out.normal.push_back(YH * s.xi[a].value());
    out.tangential.push_back(-s.H.value() * push[a].value());
    out.residual.push_back(out.direct[a] - out.normal[a] - out.tangential[a]);
  }
  return out;
}

}  // namespace bitension
