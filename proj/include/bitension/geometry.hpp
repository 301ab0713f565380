#pragma once

/**
 * @file geometry.hpp
 * @brief Riemannian machinery on coordinate charts: Christoffel symbols,
 * curvature, the pullback connection along a map, tension, Jacobi operator,
 * bitension and bienergy.
 *
 * Flattened layouts (all row-major):
 *   metric            g_ij        -> i*m + j
 *   Christoffel       Gamma^k_ij  -> k*m*m + i*m + j
 *   Riemann           R^l_kij     -> l*m^3 + k*m^2 + i*m + j,
 *                     where R(d_i, d_j) d_k = R^l_kij d_l and
 *                     R(X, Y) = [nabla_X, nabla_Y] - nabla_[X,Y].
 *
 * Vectors along a map are components in the codomain coordinate frame.
 */

#include <gsl/gsl_integration.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bitension/errors.hpp"
#include "bitension/expr.hpp"
#include "bitension/jet.hpp"
#include "bitension/sampling.hpp"

namespace bitension {

using JetVec = std::vector<Jet>;
using Point = std::vector<double>;

inline Params merged(const Params& a, const Params& b) {
  Params out = a;
  for (const auto& [k, v] : b) out.insert_or_assign(k, v);
  return out;
}

// ---------------------------------------------------------------------------
// Charts and expression-valued objects
// ---------------------------------------------------------------------------

struct ChartDomain {
  std::vector<std::string> coordinates;
  std::vector<Interval> box;
  std::vector<Hyperplane> excluded;

  static ChartDomain unbounded(std::vector<std::string> coords) {
    ChartDomain d;
    d.box.assign(coords.size(), Interval{});
    d.coordinates = std::move(coords);
    return d;
  }
  static ChartDomain boxed(std::vector<std::string> coords, std::vector<Interval> box) {
    ChartDomain d;
    d.coordinates = std::move(coords);
    d.box = std::move(box);
    return d;
  }

  int dim() const { return static_cast<int>(coordinates.size()); }

  bool contains(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != dim()) return false;
    for (int i = 0; i < dim(); ++i)
      if (!(x[i] > box[i].lo && x[i] < box[i].hi)) return false;
    for (const auto& hp : excluded)
      if (x[hp.coordinate] == hp.value) return false;
    return true;
  }

  void require(std::span<const double> x, const std::string& what) const {
    if (!contains(x)) throw GeometryError(what + " lies outside its chart", Point(x.begin(), x.end()));
  }

  std::vector<Point> sample(int count, std::uint64_t seed) const { return sobol_points(box, excluded, count, seed); }
};

struct RiemannianMetric {
  ChartDomain domain;
  std::vector<Expr> components;  // dim*dim, row-major
  Params parameters;

  int dim() const { return domain.dim(); }
  const Expr& component(int i, int j) const { return components[i * dim() + j]; }

  static RiemannianMetric euclidean(ChartDomain d) {
    const int m = d.dim();
    RiemannianMetric g{std::move(d), {}, {}};
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) g.components.emplace_back(i == j ? 1.0 : 0.0);
    return g;
  }
  static RiemannianMetric diagonal(ChartDomain d, const std::vector<Expr>& diag, Params p = {}) {
    const int m = d.dim();
    if (static_cast<int>(diag.size()) != m) throw Error("diagonal metric needs one entry per coordinate");
    RiemannianMetric g{std::move(d), {}, std::move(p)};
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) g.components.push_back(i == j ? diag[i] : Expr(0.0));
    return g;
  }
  /// The same chart with every component multiplied by `factor`.
  RiemannianMetric scaled(const Expr& factor, const Params& extra = {}) const {
    RiemannianMetric out{domain, {}, merged(parameters, extra)};
    for (const auto& c : components) out.components.push_back(factor * c);
    return out;
  }
};

struct SmoothMap {
  ChartDomain domain;
  std::vector<Expr> components;  // one per codomain coordinate
  Params parameters;

  int domain_dim() const { return domain.dim(); }
  int codomain_dim() const { return static_cast<int>(components.size()); }
};

struct VectorFieldAlongMap {
  std::vector<Expr> components;  // codomain frame, functions of domain coordinates
  Params parameters;
};

struct ScalarField {
  Expr expr;
  Params parameters;
};

// ---------------------------------------------------------------------------
// Jet helpers
// ---------------------------------------------------------------------------

inline JetVec seed_point(std::span<const double> x, int order) {
  JetVec out;
  const int m = static_cast<int>(x.size());
  for (int i = 0; i < m; ++i) out.push_back(Jet::variable(i, x[i], m, order));
  return out;
}

inline std::vector<double> values(const JetVec& v) {
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& j : v) out.push_back(j.value());
  return out;
}

/// Binds a chart's coordinate names to seed jets for repeated evaluation.
class JetBindings {
 public:
  JetBindings(const std::vector<std::string>& names, const JetVec& seeds) : m_(static_cast<int>(seeds.size())) {
    if (names.size() != seeds.size()) throw Error("coordinate count does not match the point dimension");
    for (std::size_t i = 0; i < names.size(); ++i) ctx_.variables.emplace(names[i], seeds[i]);
  }
  Jet operator()(const Expr& e, const Params& p) {
    ctx_.parameters = &p;
    Jet r = evaluate(e, ctx_, m_);
    return r.order() > order_cap() ? r.truncated(order_cap()) : r;
  }

 private:
  int order_cap() const { return ctx_.variables.empty() ? kJetOrder : ctx_.variables.begin()->second.order(); }
  EvalContext<Jet> ctx_;
  int m_;
};

/// Inverse of a symmetric positive-definite matrix of jets: the value is
/// inverted numerically and the higher coefficients follow from the Neumann
/// series of (A0 + E)^-1, which terminates because E has no constant term.
inline JetVec inverse_spd(const JetVec& a, int n, const std::span<const double> where = {}) {
  Eigen::MatrixXd a0(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a0(i, j) = a[i * n + j].value();
  Eigen::LLT<Eigen::MatrixXd> llt(a0);
  if (llt.info() != Eigen::Success || !a0.allFinite())
    throw GeometryError("metric is not positive definite", Point(where.begin(), where.end()));
  const Eigen::MatrixXd p = llt.solve(Eigen::MatrixXd::Identity(n, n));

  const int order = a.front().order();
  const int vars = a.front().num_vars();
  JetVec b(n * n, Jet::constant(0.0, vars).truncated(order));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        Jet e = a[k * n + j];
        e -= e.value();
        b[i * n + j] -= p(i, k) * e;
      }
  JetVec result(n * n), term(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) result[i * n + j] = term[i * n + j] = Jet::constant(p(i, j), vars).truncated(order);
  for (int step = 1; step <= order; ++step) {
    JetVec next(n * n, Jet::constant(0.0, vars).truncated(order));
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j) next[i * n + j] += b[i * n + k] * term[k * n + j];
    term = std::move(next);
    for (int t = 0; t < n * n; ++t) result[t] += term[t];
  }
  return result;
}

/// Metric components, inverse and Christoffel symbols as jets at one point.
struct MetricJets {
  int dim = 0;
  JetVec g, ginv, gamma;

  static MetricJets build(JetVec components, int m, std::span<const double> where = {}) {
    MetricJets out;
    out.dim = m;
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) {
        const double a = components[i * m + j].value(), b = components[j * m + i].value();
        if (std::abs(a - b) > 1e-12 * std::max(1.0, std::abs(a)))
          throw GeometryError("metric components are not symmetric", Point(where.begin(), where.end()));
        components[j * m + i] = components[i * m + j];
      }
    out.g = std::move(components);
    out.ginv = inverse_spd(out.g, m, where);
    if (out.g.front().order() >= 1) {
      // dg[a][i][j] = d_a g_ij
      JetVec dg;
      dg.reserve(m * m * m);
      for (int a = 0; a < m; ++a)
        for (int t = 0; t < m * m; ++t) dg.push_back(derivative(out.g[t], a));
      auto d = [&](int a, int i, int j) -> const Jet& { return dg[(a * m + i) * m + j]; };
      out.gamma.assign(m * m * m, Jet());
      for (int k = 0; k < m; ++k)
        for (int i = 0; i < m; ++i)
          for (int j = i; j < m; ++j) {
            Jet s = Jet::constant(0.0, out.g.front().num_vars()).truncated(dg.front().order());
            for (int l = 0; l < m; ++l) s += out.ginv[k * m + l] * (d(i, j, l) + d(j, i, l) - d(l, i, j));
            s *= 0.5;
            out.gamma[(k * m + i) * m + j] = s;
            out.gamma[(k * m + j) * m + i] = std::move(s);
          }
    }
    return out;
  }

  double christoffel(int k, int i, int j) const { return gamma[(k * dim + i) * dim + j].value(); }

  /// R^l_kij at the base point; needs Christoffel jets of order at least 1.
  std::vector<double> riemann() const {
    const int m = dim;
    std::vector<double> r(m * m * m * m, 0.0);
    auto G = [&](int l, int i, int j) { return gamma[(l * m + i) * m + j].value(); };
    auto dG = [&](int a, int l, int i, int j) { return gamma[(l * m + i) * m + j].gradient(a); };
    for (int l = 0; l < m; ++l)
      for (int k = 0; k < m; ++k)
        for (int i = 0; i < m; ++i)
          for (int j = 0; j < m; ++j) {
            double v = dG(i, l, j, k) - dG(j, l, i, k);
            for (int p = 0; p < m; ++p) v += G(l, i, p) * G(p, j, k) - G(l, j, p) * G(p, i, k);
            r[((l * m + k) * m + i) * m + j] = v;
          }
    return r;
  }
};

inline MetricJets metric_jets(const RiemannianMetric& g, std::span<const double> x, int order = kJetOrder) {
  g.domain.require(x, "point");
  const JetVec seeds = seed_point(x, order);
  JetBindings bind(g.domain.coordinates, seeds);
  JetVec comps;
  for (const auto& c : g.components) comps.push_back(bind(c, g.parameters));
  return MetricJets::build(std::move(comps), g.dim(), x);
}

// ---------------------------------------------------------------------------
// Pullback geometry at a point
// ---------------------------------------------------------------------------

/**
 * Everything needed to differentiate along a map phi: (M, g) -> (N, h) at one
 * domain point x, as jets in the domain coordinates. Target quantities are
 * expanded at phi(x) and composed with phi. Objects built at the same point
 * with the same order produce mutually compatible jets.
 */
class PullbackGeometry {
 public:
  PullbackGeometry(const SmoothMap& phi, const RiemannianMetric& g, const RiemannianMetric& h,
                   std::span<const double> x, int order = kJetOrder)
      : PullbackGeometry(phi, &g, h, x, order) {}

  /// Domain metric taken to be the pullback phi*h; valid to one order less.
  static PullbackGeometry induced(const SmoothMap& phi, const RiemannianMetric& h, std::span<const double> x,
                                  int order = kJetOrder) {
    return PullbackGeometry(phi, nullptr, h, x, order);
  }

  int m() const { return m_; }
  int n() const { return n_; }
  const Point& point() const { return x_; }
  const Point& image() const { return y_; }
  const JetVec& coordinates() const { return seeds_; }
  const JetVec& map() const { return phi_; }
  const JetVec& dphi(int i) const { return dphi_[i]; }
  const MetricJets& domain_metric() const { return dom_; }
  const MetricJets& target_metric_at_image() const { return tgt_; }
  const JetVec& target_metric() const { return hphi_; }
  const std::vector<double>& target_riemann() const { return riemann_; }

  Jet zero(int order) const { return Jet::constant(0.0, m_).truncated(order); }
  JetVec zeros(int count, int order) const { return JetVec(count, zero(order)); }

  Jet scalar(const Expr& e, const Params& p) { return bind_(e, p); }
  Jet scalar(const ScalarField& f) { return bind_(f.expr, f.parameters); }
  JetVec field(const VectorFieldAlongMap& X) {
    if (static_cast<int>(X.components.size()) != n_) throw Error("vector field dimension does not match the codomain");
    JetVec out;
    for (const auto& c : X.components) out.push_back(bind_(c, X.parameters));
    return out;
  }

  // --- domain calculus -----------------------------------------------------

  /// grad f = g^{ij} d_j f d_i
  JetVec gradient(const Jet& f) const {
    JetVec df;
    for (int j = 0; j < m_; ++j) df.push_back(derivative(f, j));
    JetVec out = zeros(m_, df.front().order());
    for (int i = 0; i < m_; ++i)
      for (int j = 0; j < m_; ++j) out[i] += dom_.ginv[i * m_ + j] * df[j];
    return out;
  }

  /// Delta f = g^{ij}(d_i d_j f - Gamma^k_ij d_k f)
  Jet laplacian(const Jet& f) const {
    JetVec df;
    for (int k = 0; k < m_; ++k) df.push_back(derivative(f, k));
    Jet out = zero(std::max(0, f.order() - 2));
    for (int i = 0; i < m_; ++i)
      for (int j = 0; j < m_; ++j) {
        Jet hess = derivative(df[j], i);
        for (int k = 0; k < m_; ++k) hess -= dom_.gamma[(k * m_ + i) * m_ + j] * df[k];
        out += dom_.ginv[i * m_ + j] * hess;
      }
    return out;
  }

  Jet domain_inner(const JetVec& u, const JetVec& v) const {
    Jet out = zero(kJetOrder);
    for (int i = 0; i < m_; ++i)
      for (int j = 0; j < m_; ++j) out += dom_.g[i * m_ + j] * u[i] * v[j];
    return out;
  }

  Jet target_inner(const JetVec& a, const JetVec& b) const {
    Jet out = zero(kJetOrder);
    for (int p = 0; p < n_; ++p)
      for (int q = 0; q < n_; ++q) out += hphi_[p * n_ + q] * a[p] * b[q];
    return out;
  }

  /// dphi(V) for a domain vector V.
  JetVec push_forward(const JetVec& v) const {
    JetVec out = zeros(n_, kJetOrder);
    for (int i = 0; i < m_; ++i)
      for (int a = 0; a < n_; ++a) out[a] += v[i] * dphi_[i][a];
    return out;
  }

  // --- pullback connection -------------------------------------------------

  /// nabla^phi_{d_i} X = d_i X + Gamma^N(phi)(dphi_i, X)
  JetVec covariant(const JetVec& X, int i) const {
    JetVec out;
    out.reserve(n_);
    for (int c = 0; c < n_; ++c) {
      Jet v = derivative(X[c], i);
      for (int b = 0; b < n_; ++b) v += conn_[(i * n_ + c) * n_ + b] * X[b];
      out.push_back(std::move(v));
    }
    return out;
  }

  JetVec covariant_along(const JetVec& X, const JetVec& V) const {
    JetVec out = zeros(n_, kJetOrder);
    for (int i = 0; i < m_; ++i) {
      const JetVec d = covariant(X, i);
      for (int c = 0; c < n_; ++c) out[c] += V[i] * d[c];
    }
    return out;
  }

  /// Trace_g (nabla^phi nabla^phi - nabla^phi_{nabla^M}) X
  JetVec rough_trace(const JetVec& X) const {
    std::vector<JetVec> first;
    for (int j = 0; j < m_; ++j) first.push_back(covariant(X, j));
    const int order = std::max(0, first.front().front().order() - 1);
    JetVec out = zeros(n_, order);
    for (int i = 0; i < m_; ++i)
      for (int j = 0; j < m_; ++j) {
        const Jet& gij = dom_.ginv[i * m_ + j];
        JetVec second = covariant(first[j], i);
        for (int k = 0; k < m_; ++k) {
          const Jet& gam = dom_.gamma[(k * m_ + i) * m_ + j];
          for (int c = 0; c < n_; ++c) second[c] -= gam * first[k][c];
        }
        for (int c = 0; c < n_; ++c) out[c] += gij * second[c];
      }
    return out;
  }

  /// Trace_g R^N(dphi, X) dphi at the base point (order-0 jets).
  JetVec curvature_trace(const JetVec& X) const {
    const int n = n_;
    std::vector<double> xv(n), out(n, 0.0);
    for (int b = 0; b < n; ++b) xv[b] = X[b].value();
    for (int i = 0; i < m_; ++i)
      for (int j = 0; j < m_; ++j) {
        const double gij = dom_.ginv[i * m_ + j].value();
        if (gij == 0.0) continue;
        for (int c = 0; c < n; ++c) {
          double s = 0.0;
          for (int d = 0; d < n; ++d) {
            const double pj = dphi_[j][d].value();
            if (pj == 0.0) continue;
            for (int a = 0; a < n; ++a) {
              const double pi = dphi_[i][a].value();
              if (pi == 0.0) continue;
              for (int b = 0; b < n; ++b) s += riemann_[((c * n + d) * n + a) * n + b] * pi * xv[b] * pj;
            }
          }
          out[c] += gij * s;
        }
      }
    JetVec r;
    for (double v : out) r.push_back(Jet::constant(v, m_).truncated(0));
    return r;
  }

  /// J(X) = -(Trace_g(nabla nabla - nabla_nabla) X - Trace_g R^N(dphi, X) dphi)
  JetVec jacobi(const JetVec& X) const {
    JetVec r = rough_trace(X);
    const JetVec c = curvature_trace(X);
    for (int k = 0; k < n_; ++k) r[k] = c[k] - r[k];
    return r;
  }

  /// tau = Trace_g nabla dphi, valid to order-2.
  const JetVec& tension() const {
    if (!tension_) {
      JetVec out = zeros(n_, std::max(0, order_ - 2));
      for (int i = 0; i < m_; ++i)
        for (int j = 0; j < m_; ++j) {
          const Jet& gij = dom_.ginv[i * m_ + j];
          JetVec t = covariant(dphi_[j], i);
          for (int k = 0; k < m_; ++k) {
            const Jet& gam = dom_.gamma[(k * m_ + i) * m_ + j];
            for (int c = 0; c < n_; ++c) t[c] -= gam * dphi_[k][c];
          }
          for (int c = 0; c < n_; ++c) out[c] += gij * t[c];
        }
      tension_ = std::move(out);
    }
    return *tension_;
  }

  /// tau2 = Trace_g(nabla nabla - nabla_nabla) tau - Trace_g R^N(dphi, tau) dphi
  JetVec bitension() const {
    const JetVec& t = tension();
    JetVec r = rough_trace(t);
    const JetVec c = curvature_trace(t);
    for (int k = 0; k < n_; ++k) r[k] -= c[k];
    return r;
  }

  /// (phi*h)_ij at the base point.
  Eigen::MatrixXd pullback_metric() const {
    Eigen::MatrixXd p(m_, m_);
    for (int i = 0; i < m_; ++i)
      for (int j = 0; j < m_; ++j) {
        double s = 0.0;
        for (int a = 0; a < n_; ++a)
          for (int b = 0; b < n_; ++b) s += hphi_[a * n_ + b].value() * dphi_[i][a].value() * dphi_[j][b].value();
        p(i, j) = s;
      }
    return p;
  }

 private:
  PullbackGeometry(const SmoothMap& phi, const RiemannianMetric* g, const RiemannianMetric& h,
                   std::span<const double> x, int order)
      : m_(phi.domain_dim()),
        n_(phi.codomain_dim()),
        order_(order),
        x_(x.begin(), x.end()),
        seeds_(seed_point(x, order)),
        bind_(phi.domain.coordinates, seeds_) {
    if (order < 2) throw Error("pullback geometry needs jets of order at least 2");
    if (static_cast<int>(x.size()) != m_) throw Error("point dimension does not match the map's domain");
    if (h.dim() != n_) throw Error("target metric dimension does not match the map's codomain");
    if (g && g->dim() != m_) throw Error("domain metric dimension does not match the map's domain");
    phi.domain.require(x, "point");
    if (g) g->domain.require(x, "point");

    for (const auto& c : phi.components) phi_.push_back(bind_(c, phi.parameters));
    y_ = values(phi_);
    h.domain.require(y_, "image point");

    // Target metric expanded at y = phi(x).
    const JetVec yseeds = seed_point(y_, order);
    JetBindings ybind(h.domain.coordinates, yseeds);
    JetVec hy;
    for (const auto& c : h.components) hy.push_back(ybind(c, h.parameters));
    tgt_ = MetricJets::build(std::move(hy), n_, y_);
    riemann_ = tgt_.riemann();

    const JetComposer compose(phi_, order);
    for (const auto& c : tgt_.g) hphi_.push_back(compose.compose(c));
    gphi_.assign(n_ * n_ * n_, Jet());
    for (int c = 0; c < n_; ++c)
      for (int a = 0; a < n_; ++a)
        for (int b = a; b < n_; ++b) {
          Jet v = compose.compose(tgt_.gamma[(c * n_ + a) * n_ + b]);
          gphi_[(c * n_ + a) * n_ + b] = v;
          gphi_[(c * n_ + b) * n_ + a] = std::move(v);
        }

    dphi_.resize(m_);
    for (int i = 0; i < m_; ++i)
      for (int a = 0; a < n_; ++a) dphi_[i].push_back(derivative(phi_[a], i));

    JetVec gx;
    if (g) {
      JetBindings gbind(g->domain.coordinates, seeds_);
      for (const auto& c : g->components) gx.push_back(gbind(c, g->parameters));
    } else {
      for (int i = 0; i < m_; ++i)
        for (int j = 0; j < m_; ++j) {
          Jet s = zero(order - 1);
          for (int a = 0; a < n_; ++a)
            for (int b = 0; b < n_; ++b) s += hphi_[a * n_ + b] * dphi_[i][a] * dphi_[j][b];
          gx.push_back(std::move(s));
        }
    }
    dom_ = MetricJets::build(std::move(gx), m_, x_);

    // conn_[i][c][b] = Gamma^c_ab(phi) d_i phi^a
    conn_.assign(m_ * n_ * n_, zero(order - 1));
    for (int i = 0; i < m_; ++i)
      for (int c = 0; c < n_; ++c)
        for (int b = 0; b < n_; ++b) {
          Jet& s = conn_[(i * n_ + c) * n_ + b];
          for (int a = 0; a < n_; ++a) s += gphi_[(c * n_ + a) * n_ + b] * dphi_[i][a];
        }
  }

  int m_, n_, order_;
  Point x_, y_;
  JetVec seeds_;
  JetBindings bind_;
  JetVec phi_;
  std::vector<JetVec> dphi_;
  MetricJets dom_, tgt_;
  std::vector<double> riemann_;
  JetVec hphi_, gphi_, conn_;
  mutable std::optional<JetVec> tension_;
};

// ---------------------------------------------------------------------------
// Point operations
// ---------------------------------------------------------------------------

/// A tensor at a point with a documented flat layout (see the file header).
struct PointEvaluation {
  Point point;
  std::string object;
  std::vector<double> components;
};

inline PointEvaluation christoffel(const RiemannianMetric& g, std::span<const double> x) {
  const MetricJets mj = metric_jets(g, x, 1);
  return {Point(x.begin(), x.end()), "christoffel", values(mj.gamma)};
}

inline PointEvaluation riemann(const RiemannianMetric& h, std::span<const double> y) {
  return {Point(y.begin(), y.end()), "riemann", metric_jets(h, y, 2).riemann()};
}

/// R(X, Y) Z with R(X,Y) = [nabla_X, nabla_Y] - nabla_[X,Y].
inline std::vector<double> curvature_apply(const RiemannianMetric& h, std::span<const double> y,
                                           std::span<const double> X, std::span<const double> Y,
                                           std::span<const double> Z) {
  const int n = h.dim();
  const std::vector<double> r = metric_jets(h, y, 2).riemann();
  std::vector<double> out(n, 0.0);
  for (int l = 0; l < n; ++l)
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out[l] += r[((l * n + k) * n + i) * n + j] * X[i] * Y[j] * Z[k];
  return out;
}

struct GradLaplacian {
  std::vector<double> gradient;
  double laplacian = 0.0;
};

inline GradLaplacian grad_and_laplacian(const ScalarField& f, const RiemannianMetric& g, std::span<const double> x) {
  const MetricJets mj = metric_jets(g, x, 2);
  const JetVec seeds = seed_point(x, 2);
  JetBindings bind(g.domain.coordinates, seeds);
  const Jet fj = bind(f.expr, f.parameters);
  const int m = g.dim();
  GradLaplacian out{std::vector<double>(m, 0.0), 0.0};
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const double gij = mj.ginv[i * m + j].value();
      out.gradient[i] += gij * fj.gradient(j);
      double hess = fj.partial([&] {
        MultiIndex a{};
        a[i] += 1;
        a[j] += 1;
        return a;
      }());
      for (int k = 0; k < m; ++k) hess -= mj.christoffel(k, i, j) * fj.gradient(k);
      out.laplacian += gij * hess;
    }
  return out;
}

inline Eigen::MatrixXd pullback_metric(const SmoothMap& phi, const RiemannianMetric& h, std::span<const double> x) {
  return PullbackGeometry::induced(phi, h, x, 2).pullback_metric();
}

inline Eigen::MatrixXd metric_values(const RiemannianMetric& g, std::span<const double> x) {
  g.domain.require(x, "point");
  EvalContext<double> ctx;
  for (int i = 0; i < g.dim(); ++i) ctx.variables.emplace(g.domain.coordinates[i], x[i]);
  ctx.parameters = &g.parameters;
  const int m = g.dim();
  Eigen::MatrixXd out(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) out(i, j) = evaluate(g.component(i, j), ctx);
  return out;
}

struct ConformalityResult {
  bool immersion = false;
  bool conformal = false;
  double lambda_sq = 0.0;
  double deviation = 0.0;  // ||phi*h - lambda^2 g|| / ||g||
};

/// Decides whether phi*h = lambda^2 g at x, with lambda^2 = trace(g^-1 phi*h)/m.
inline ConformalityResult conformality_factor(const SmoothMap& phi, const RiemannianMetric& g,
                                              const RiemannianMetric& h, std::span<const double> x, double tol) {
  const Eigen::MatrixXd p = pullback_metric(phi, h, x);
  const Eigen::MatrixXd gv = metric_values(g, x);
  const int m = g.dim();
  ConformalityResult r;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(p);
  const double top = eig.eigenvalues().cwiseAbs().maxCoeff();
  r.immersion = top > 0.0 && eig.eigenvalues().minCoeff() > 1e-12 * top;
  r.lambda_sq = (gv.llt().solve(p)).trace() / m;
  r.deviation = (p - r.lambda_sq * gv).norm() / gv.norm();
  r.conformal = r.immersion && r.deviation < tol;
  return r;
}

inline std::vector<double> tension_field(const SmoothMap& phi, const RiemannianMetric& g, const RiemannianMetric& h,
                                         std::span<const double> x) {
  return values(PullbackGeometry(phi, g, h, x, 2).tension());
}

inline std::vector<double> jacobi_apply(const SmoothMap& phi, const RiemannianMetric& g, const RiemannianMetric& h,
                                        const VectorFieldAlongMap& X, std::span<const double> x) {
  PullbackGeometry geo(phi, g, h, x, 3);
  return values(geo.jacobi(geo.field(X)));
}

inline std::vector<double> bitension_field(const SmoothMap& phi, const RiemannianMetric& g,
                                           const RiemannianMetric& h, std::span<const double> x) {
  return values(PullbackGeometry(phi, g, h, x).bitension());
}

inline double norm(std::span<const double> v) {
  double s = 0.0;
  for (double c : v) s += c * c;
  return std::sqrt(s);
}

// ---------------------------------------------------------------------------
// Integrals
// ---------------------------------------------------------------------------

/// Tensor-product Gauss-Legendre rule on a box: calls f(x, weight) per node.
inline void gauss_legendre(const std::vector<Interval>& region, int order,
                           const std::function<void(const Point&, double)>& f) {
  if (order < 1) throw Error("quadrature order must be positive");
  for (const auto& iv : region)
    if (!iv.finite()) throw Error("integration region must be bounded");
  std::unique_ptr<gsl_integration_glfixed_table, decltype(&gsl_integration_glfixed_table_free)> table(
      gsl_integration_glfixed_table_alloc(static_cast<std::size_t>(order)), &gsl_integration_glfixed_table_free);
  const int m = static_cast<int>(region.size());
  std::vector<std::vector<double>> nodes(m, std::vector<double>(order)), weights(m, std::vector<double>(order));
  for (int d = 0; d < m; ++d)
    for (int k = 0; k < order; ++k)
      gsl_integration_glfixed_point(region[d].lo, region[d].hi, k, &nodes[d][k], &weights[d][k], table.get());
  std::vector<int> idx(m, 0);
  Point x(m);
  for (;;) {
    double w = 1.0;
    for (int d = 0; d < m; ++d) {
      x[d] = nodes[d][idx[d]];
      w *= weights[d][idx[d]];
    }
    f(x, w);
    int d = 0;
    while (d < m && ++idx[d] == order) idx[d++] = 0;
    if (d == m) break;
  }
}

inline void require_region(const ChartDomain& dom, const std::vector<Interval>& region) {
  if (static_cast<int>(region.size()) != dom.dim()) throw Error("integration region dimension mismatch");
  for (int i = 0; i < dom.dim(); ++i)
    if (!(region[i].lo >= dom.box[i].lo && region[i].hi <= dom.box[i].hi && region[i].lo < region[i].hi))
      throw GeometryError("integration region leaves the chart");
}

/// E2(phi) = 1/2 int |tau(phi)|^2_h dv_g over a box.
inline double bienergy(const SmoothMap& phi, const RiemannianMetric& g, const RiemannianMetric& h,
                       const std::vector<Interval>& region, int order) {
  require_region(phi.domain, region);
  double total = 0.0;
  gauss_legendre(region, order, [&](const Point& x, double w) {
    const PullbackGeometry geo(phi, g, h, x, 2);
    const double t2 = geo.target_inner(geo.tension(), geo.tension()).value();
    Eigen::MatrixXd gv(geo.m(), geo.m());
    for (int i = 0; i < geo.m(); ++i)
      for (int j = 0; j < geo.m(); ++j) gv(i, j) = geo.domain_metric().g[i * geo.m() + j].value();
    total += w * 0.5 * t2 * std::sqrt(gv.determinant());
  });
  return total;
}

/// phi + t V as a new map.
inline SmoothMap perturbed(const SmoothMap& phi, const VectorFieldAlongMap& V, double t) {
  if (static_cast<int>(V.components.size()) != phi.codomain_dim()) throw Error("perturbation dimension mismatch");
  SmoothMap out{phi.domain, {}, merged(phi.parameters, V.parameters)};
  for (int a = 0; a < phi.codomain_dim(); ++a) out.components.push_back(phi.components[a] + Expr(t) * V.components[a]);
  return out;
}

struct FirstVariation {
  double slope = 0.0;    // (E2(phi + tV) - E2(phi - tV)) / 2t
  double pairing = 0.0;  // int <tau2(phi), V>_h dv_g
};

inline FirstVariation first_variation_check(const SmoothMap& phi, const VectorFieldAlongMap& V,
                                            const RiemannianMetric& g, const RiemannianMetric& h,
                                            const std::vector<Interval>& region, double t, int order) {
  FirstVariation out;
  out.slope = (bienergy(perturbed(phi, V, t), g, h, region, order) -
               bienergy(perturbed(phi, V, -t), g, h, region, order)) /
              (2.0 * t);
  gauss_legendre(region, order, [&](const Point& x, double w) {
    PullbackGeometry geo(phi, g, h, x);
    const JetVec t2 = geo.bitension();
    const JetVec v = geo.field(V);
    Eigen::MatrixXd gv(geo.m(), geo.m());
    for (int i = 0; i < geo.m(); ++i)
      for (int j = 0; j < geo.m(); ++j) gv(i, j) = geo.domain_metric().g[i * geo.m() + j].value();
    out.pairing += w * geo.target_inner(t2, v).value() * std::sqrt(gv.determinant());
  });
  return out;
}

}  // namespace bitension
