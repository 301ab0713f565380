#pragma once

// Conformal change of the domain metric, gbar = F^-2 g: the g-side formulas
// for the tension field, Jacobi operator and bitension field under gbar, the
// harmonic-to-biharmonic condition, and the conformal-immersion criterion.
// Every operator inside a formula is taken w.r.t. g.

#include <string>
#include <vector>

#include "bitension/geometry.hpp"

namespace bitension {

/// gbar = F^-2 g as composed expressions.
inline RiemannianMetric conformal_metric(const RiemannianMetric& g, const ScalarField& F) {
  return g.scaled(Expr(1.0) / (F.expr * F.expr), F.parameters);
}

/// Rejects factors that are not positive at any of the given points.
inline void require_positive(const ScalarField& F, const ChartDomain& dom, const std::vector<Point>& points) {
  for (const auto& x : points) {
    EvalContext<double> ctx;
    for (int i = 0; i < dom.dim(); ++i) ctx.variables.emplace(dom.coordinates[i], x[i]);
    ctx.parameters = &F.parameters;
    const double v = evaluate(F.expr, ctx);
    if (!(v > 0.0)) throw GeometryError("conformal factor is not positive", x);
  }
}

/// ln F and its g-derivatives at the geometry's point.
struct FactorJets {
  Jet F, lnF, lap_lnF, grad_sq;
  JetVec grad_lnF;  // domain vector
  JetVec dphi_grad;  // dphi(grad ln F)
};

inline FactorJets factor_jets(PullbackGeometry& geo, const ScalarField& F) {
  FactorJets f;
  f.F = geo.scalar(F);
  if (!(f.F.value() > 0.0)) throw GeometryError("conformal factor is not positive", geo.point());
  f.lnF = log(f.F);
  f.grad_lnF = geo.gradient(f.lnF);
  f.lap_lnF = geo.laplacian(f.lnF);
  f.grad_sq = geo.domain_inner(f.grad_lnF, f.grad_lnF);
  f.dphi_grad = geo.push_forward(f.grad_lnF);
  return f;
}

namespace detail {

inline void axpy(std::vector<double>& y, double a, const JetVec& x) {
  for (std::size_t k = 0; k < y.size(); ++k) y[k] += a * x[k].value();
}

}  // namespace detail

/// F^2 { tau(phi, g) - (m-2) dphi(grad ln F) }
inline std::vector<double> tension_transform_rhs(const SmoothMap& phi, const RiemannianMetric& g,
                                                 const RiemannianMetric& h, const ScalarField& F,
                                                 std::span<const double> x) {
  PullbackGeometry geo(phi, g, h, x, 2);
  const FactorJets f = factor_jets(geo, F);
  const int m = geo.m();
  std::vector<double> out(geo.n(), 0.0);
  detail::axpy(out, 1.0, geo.tension());
  detail::axpy(out, -(m - 2.0), f.dphi_grad);
  const double F2 = f.F.value() * f.F.value();
  for (auto& v : out) v *= F2;
  return out;
}

/// F^2 J_g(X) + F^2 (m-2) nabla_{grad ln F} X
inline std::vector<double> jacobi_transform_rhs(const SmoothMap& phi, const RiemannianMetric& g,
                                                const RiemannianMetric& h, const ScalarField& F,
                                                const VectorFieldAlongMap& X, std::span<const double> x) {
  PullbackGeometry geo(phi, g, h, x, 3);
  const FactorJets f = factor_jets(geo, F);
  const JetVec Xj = geo.field(X);
  const int m = geo.m();
  std::vector<double> out(geo.n(), 0.0);
  detail::axpy(out, 1.0, geo.jacobi(Xj));
  detail::axpy(out, m - 2.0, geo.covariant_along(Xj, f.grad_lnF));
  const double F2 = f.F.value() * f.F.value();
  for (auto& v : out) v *= F2;
  return out;
}

/// The full bitension transformation law for gbar = F^-2 g.
inline std::vector<double> bitension_transform_rhs(const SmoothMap& phi, const RiemannianMetric& g,
                                                   const RiemannianMetric& h, const ScalarField& F,
                                                   std::span<const double> x) {
  PullbackGeometry geo(phi, g, h, x);
  const FactorJets f = factor_jets(geo, F);
  const double m = geo.m();
  const JetVec& tau = geo.tension();
  const double c = f.lap_lnF.value() - (m - 4.0) * f.grad_sq.value();

  std::vector<double> out(geo.n(), 0.0);
  detail::axpy(out, 1.0, geo.bitension());
  detail::axpy(out, m - 2.0, geo.jacobi(f.dphi_grad));
  detail::axpy(out, 2.0 * c, tau);
  detail::axpy(out, -(m - 6.0), geo.covariant_along(tau, f.grad_lnF));
  detail::axpy(out, -2.0 * (m - 2.0) * c, f.dphi_grad);
  detail::axpy(out, (m - 2.0) * (m - 6.0), geo.covariant_along(f.dphi_grad, f.grad_lnF));
  const double F2 = f.F.value() * f.F.value();
  for (auto& v : out) v *= F2 * F2;
  return out;
}

/// Two-dimensional form: F^4 { tau2 + 2(Delta ln F + 2|grad ln F|^2) tau + 4 nabla_{grad ln F} tau }
inline std::vector<double> bitension_transform_rhs_dim2(const SmoothMap& phi, const RiemannianMetric& g,
                                                        const RiemannianMetric& h, const ScalarField& F,
                                                        std::span<const double> x) {
  PullbackGeometry geo(phi, g, h, x);
  if (geo.m() != 2) throw Error("the two-dimensional bitension law needs a 2-dimensional domain");
  const FactorJets f = factor_jets(geo, F);
  const JetVec& tau = geo.tension();
  std::vector<double> out(geo.n(), 0.0);
  detail::axpy(out, 1.0, geo.bitension());
  detail::axpy(out, 2.0 * (f.lap_lnF.value() + 2.0 * f.grad_sq.value()), tau);
  detail::axpy(out, 4.0, geo.covariant_along(tau, f.grad_lnF));
  const double F2 = f.F.value() * f.F.value();
  for (auto& v : out) v *= F2 * F2;
  return out;
}

/// For a g-harmonic phi with m != 2, phi is biharmonic w.r.t. F^-2 g iff this
/// vanishes:
///   J_g(dphi(grad ln F)) + (m-6) nabla_{grad ln F} dphi(grad ln F)
///     - 2 (Delta ln F - (m-4)|grad ln F|^2) dphi(grad ln F)
inline std::vector<double> harmonic_biharmonic_condition(const SmoothMap& phi, const RiemannianMetric& g,
                                                         const RiemannianMetric& h, const ScalarField& F,
                                                         std::span<const double> x, double harmonic_tol = 1e-8) {
  if (phi.domain_dim() == 2) throw Error("the harmonic-to-biharmonic condition assumes m != 2");
  PullbackGeometry geo(phi, g, h, x, 3);
  if (norm(values(geo.tension())) >= harmonic_tol)
    throw GeometryError("map is not harmonic w.r.t. the base metric", geo.point());
  const FactorJets f = factor_jets(geo, F);
  const double m = geo.m();
  std::vector<double> out(geo.n(), 0.0);
  detail::axpy(out, 1.0, geo.jacobi(f.dphi_grad));
  detail::axpy(out, m - 6.0, geo.covariant_along(f.dphi_grad, f.grad_lnF));
  detail::axpy(out, -2.0 * (f.lap_lnF.value() - (m - 4.0) * f.grad_sq.value()), f.dphi_grad);
  return out;
}

struct ConformalImmersionResidual {
  std::vector<double> lhs;       // lambda^4 tau2(phi, gbar)
  std::vector<double> rhs;       // g-side bracket
  std::vector<double> residual;  // lhs - rhs; equals tau2(phi, g), zero iff biharmonic
  std::vector<double> identity;  // lhs - rhs - tau2(phi, g); zero for every conformal immersion
};

/**
 * Criterion for a conformal immersion phi*h = lambda^2 g to be biharmonic,
 * through its associated isometric immersion (gbar = lambda^2 g, mean
 * curvature vector eta = tau(phi, gbar)/m):
 *
 *   lambda^4 tau2(phi, gbar) = -(m-2) J_g(dphi(grad ln lambda))
 *       + 2m lambda^2 (-Delta ln lambda - 2|grad ln lambda|^2) eta
 *       + m(m-6) lambda^2 nabla_{grad ln lambda} eta
 */
inline ConformalImmersionResidual conformal_immersion_residual(const SmoothMap& phi, const RiemannianMetric& g,
                                                               const RiemannianMetric& h,
                                                               const ScalarField& lambda_sq,
                                                               std::span<const double> x, double conformal_tol = 1e-8) {
  const RiemannianMetric gbar = g.scaled(lambda_sq.expr, lambda_sq.parameters);
  PullbackGeometry geo(phi, g, h, x);
  PullbackGeometry bar(phi, gbar, h, x);

  const Jet l2 = geo.scalar(lambda_sq);
  if (!(l2.value() > 0.0)) throw GeometryError("conformal factor is not positive", geo.point());
  const Eigen::MatrixXd pull = geo.pullback_metric();
  Eigen::MatrixXd gv(geo.m(), geo.m());
  for (int i = 0; i < geo.m(); ++i)
    for (int j = 0; j < geo.m(); ++j) gv(i, j) = geo.domain_metric().g[i * geo.m() + j].value();
  if ((pull - l2.value() * gv).norm() > conformal_tol * pull.norm())
    throw GeometryError("map is not conformal with the given factor", geo.point());

  const double m = geo.m();
  const double L2 = l2.value();
  const Jet lnl = 0.5 * log(l2);
  const JetVec grad = geo.gradient(lnl);
  const double lap = geo.laplacian(lnl).value();
  const double gsq = geo.domain_inner(grad, grad).value();
  JetVec eta = bar.tension();
  for (auto& e : eta) e *= 1.0 / m;

  ConformalImmersionResidual r;
  r.lhs = values(bar.bitension());
  for (auto& v : r.lhs) v *= L2 * L2;
  r.rhs.assign(geo.n(), 0.0);
  detail::axpy(r.rhs, -(m - 2.0), geo.jacobi(geo.push_forward(grad)));
  detail::axpy(r.rhs, 2.0 * m * L2 * (-lap - 2.0 * gsq), eta);
  detail::axpy(r.rhs, m * (m - 6.0) * L2, geo.covariant_along(eta, grad));
  const std::vector<double> t2 = values(geo.bitension());
  for (int k = 0; k < geo.n(); ++k) {
    r.residual.push_back(r.lhs[k] - r.rhs[k]);
    r.identity.push_back(r.lhs[k] - r.rhs[k] - t2[k]);
  }
  return r;
}

}  // namespace bitension
