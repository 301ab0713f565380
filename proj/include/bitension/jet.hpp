#pragma once

/**
 * @file jet.hpp
 * @brief Truncated multivariate Taylor arithmetic ("jets").
 *
 * A Jet holds the Taylor expansion of a function of m real variables
 * around a seed point, truncated at total degree 4. Internally the
 * coefficients are stored as Taylor coefficients a_alpha = d^alpha f / alpha!
 * in graded lexicographic order, which turns multiplication into a plain
 * convolution. partial() converts back to derivatives.
 *
 * Every jet also carries the order up to which its coefficients are valid.
 * Seeds and constants are valid to order 4; differentiating a jet lowers its
 * valid order by one, and binary operations keep the minimum of their
 * operands. Asking for a derivative above the valid order is an error.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "bitension/errors.hpp"

namespace bitension {

inline constexpr int kJetOrder = 4;
inline constexpr int kMaxJetVars = 8;

using MultiIndex = std::array<std::uint8_t, kMaxJetVars>;

inline int total_degree(const MultiIndex& alpha) {
  int d = 0;
  for (auto a : alpha) d += a;
  return d;
}

/// Index bookkeeping for all multi-indices of total degree <= 4 in m variables.
class MultiIndexSet {
 public:
  struct Product {
    std::uint16_t lhs, rhs, out;
  };
  struct Shift {
    std::uint16_t dst, src;
    double factor;
  };

  static const MultiIndexSet& get(int num_vars) {
    static const auto sets = [] {
      std::array<std::unique_ptr<MultiIndexSet>, kMaxJetVars + 1> s;
      for (int m = 1; m <= kMaxJetVars; ++m) s[m].reset(new MultiIndexSet(m));
      return s;
    }();
    if (num_vars < 1 || num_vars > kMaxJetVars)
      throw Error("jet dimension " + std::to_string(num_vars) + " outside [1, " +
                  std::to_string(kMaxJetVars) + "]");
    return *sets[num_vars];
  }

  int num_vars() const { return num_vars_; }
  std::size_t size() const { return indices_.size(); }
  /// Number of multi-indices with degree <= order (a prefix of the ordering).
  std::size_t size_upto(int order) const { return upto_[order]; }
  const MultiIndex& index(std::size_t k) const { return indices_[k]; }
  int degree(std::size_t k) const { return degrees_[k]; }
  double factorial(std::size_t k) const { return factorials_[k]; }

  std::size_t position(const MultiIndex& alpha) const {
    std::size_t key = 0, scale = 1;
    for (int i = 0; i < kMaxJetVars; ++i) {
      if (i >= num_vars_) {
        if (alpha[i] != 0) throw Error("multi-index addresses a variable beyond the jet dimension");
        continue;
      }
      if (alpha[i] > kJetOrder) throw Error("multi-index exceeds jet order");
      key += alpha[i] * scale;
      scale *= kJetOrder + 1;
    }
    const int pos = lookup_[key];
    if (pos < 0) throw Error("multi-index exceeds jet order");
    return static_cast<std::size_t>(pos);
  }

  /// Pairs (lhs, rhs, out) with index(lhs) + index(rhs) = index(out), restricted
  /// to degree(out) <= order.
  std::span<const Product> products(int order) const {
    return {products_.data(), products_upto_[order]};
  }

  /// Coefficient moves that differentiate with respect to `var`, restricted to
  /// destination degree <= order.
  std::span<const Shift> shifts(int var, int order) const {
    return {shifts_[var].data(), shifts_upto_[var][order]};
  }

 private:
  explicit MultiIndexSet(int m) : num_vars_(m) {
    for (int d = 0; d <= kJetOrder; ++d) {
      MultiIndex alpha{};
      enumerate(alpha, 0, d);
      upto_[d] = indices_.size();
    }
    std::size_t table = 1;
    for (int i = 0; i < m; ++i) table *= kJetOrder + 1;
    lookup_.assign(table, -1);
    for (std::size_t k = 0; k < indices_.size(); ++k) {
      std::size_t key = 0, scale = 1;
      double fact = 1.0;
      for (int i = 0; i < m; ++i) {
        key += indices_[k][i] * scale;
        scale *= kJetOrder + 1;
        for (int f = 2; f <= indices_[k][i]; ++f) fact *= f;
      }
      lookup_[key] = static_cast<int>(k);
      degrees_.push_back(total_degree(indices_[k]));
      factorials_.push_back(fact);
    }
    for (int d = 0; d <= kJetOrder; ++d) {
      for (std::size_t a = 0; a < indices_.size(); ++a) {
        for (std::size_t b = 0; b < indices_.size(); ++b) {
          if (degrees_[a] + degrees_[b] != d) continue;
          MultiIndex sum{};
          for (int i = 0; i < m; ++i) sum[i] = indices_[a][i] + indices_[b][i];
          products_.push_back({static_cast<std::uint16_t>(a), static_cast<std::uint16_t>(b),
                               static_cast<std::uint16_t>(position(sum))});
        }
      }
      products_upto_[d] = products_.size();
    }
    shifts_.resize(m);
    shifts_upto_.resize(m);
    for (int v = 0; v < m; ++v) {
      for (int d = 0; d <= kJetOrder; ++d) {
        for (std::size_t k = (d == 0 ? 0 : upto_[d - 1]); k < upto_[d]; ++k) {
          if (d == kJetOrder) continue;
          MultiIndex up = indices_[k];
          up[v] += 1;
          shifts_[v].push_back({static_cast<std::uint16_t>(k),
                                static_cast<std::uint16_t>(position(up)),
                                static_cast<double>(up[v])});
        }
        shifts_upto_[v][d] = shifts_[v].size();
      }
    }
  }

  void enumerate(MultiIndex& alpha, int var, int remaining) {
    if (var == num_vars_ - 1) {
      alpha[var] = static_cast<std::uint8_t>(remaining);
      indices_.push_back(alpha);
      alpha[var] = 0;
      return;
    }
    for (int a = remaining; a >= 0; --a) {
      alpha[var] = static_cast<std::uint8_t>(a);
      enumerate(alpha, var + 1, remaining - a);
    }
    alpha[var] = 0;
  }

  int num_vars_;
  std::vector<MultiIndex> indices_;
  std::vector<int> degrees_;
  std::vector<double> factorials_;
  std::array<std::size_t, kJetOrder + 1> upto_{};
  std::vector<int> lookup_;
  std::vector<Product> products_;
  std::array<std::size_t, kJetOrder + 1> products_upto_{};
  std::vector<std::vector<Shift>> shifts_;
  std::vector<std::array<std::size_t, kJetOrder + 1>> shifts_upto_;
};

class Jet {
 public:
  Jet() = default;

  static Jet constant(double value, int num_vars) {
    Jet j(MultiIndexSet::get(num_vars), kJetOrder);
    j.c_[0] = value;
    return j;
  }

  /// Coordinate function x_index seeded at `value`.
  static Jet variable(int index, double value, int num_vars, int order = kJetOrder) {
    if (index < 0 || index >= num_vars)
      throw Error("seed index " + std::to_string(index) + " out of range for " +
                  std::to_string(num_vars) + " variables");
    if (order < 0 || order > kJetOrder) throw Error("jet order out of range");
    Jet j(MultiIndexSet::get(num_vars), order);
    j.c_[0] = value;
    if (order >= 1) {
      MultiIndex e{};
      e[index] = 1;
      j.c_[j.set_->position(e)] = 1.0;
    }
    return j;
  }

  bool empty() const { return set_ == nullptr; }
  int num_vars() const { return set_->num_vars(); }
  int order() const { return order_; }
  const MultiIndexSet& index_set() const { return *set_; }
  double value() const { return c_[0]; }
  std::span<const double> taylor() const { return c_; }
  double taylor(std::size_t k) const { return c_[k]; }

  /// d^alpha f at the seed point.
  double partial(const MultiIndex& alpha) const {
    const int d = total_degree(alpha);
    if (d > order_)
      throw Error("requested derivative of degree " + std::to_string(d) +
                  " from a jet valid to order " + std::to_string(order_));
    const std::size_t k = set_->position(alpha);
    return c_[k] * set_->factorial(k);
  }

  double partial(std::initializer_list<int> alpha) const {
    MultiIndex a{};
    std::size_t i = 0;
    for (int v : alpha) a[i++] = static_cast<std::uint8_t>(v);
    return partial(a);
  }

  /// First partial d f / d x_var at the seed point.
  double gradient(int var) const {
    MultiIndex e{};
    e[var] = 1;
    return partial(e);
  }

  bool is_constant() const {
    return std::all_of(c_.begin() + 1, c_.end(), [](double v) { return v == 0.0; });
  }

  Jet truncated(int order) const {
    if (order >= order_) return *this;
    Jet r(*set_, order);
    std::copy_n(c_.begin(), r.c_.size(), r.c_.begin());
    return r;
  }

  Jet operator-() const {
    Jet r = *this;
    for (auto& v : r.c_) v = -v;
    return r;
  }

  Jet& operator+=(double s) {
    c_[0] += s;
    return *this;
  }
  Jet& operator-=(double s) {
    c_[0] -= s;
    return *this;
  }
  Jet& operator*=(double s) {
    for (auto& v : c_) v *= s;
    return *this;
  }
  Jet& operator/=(double s) {
    if (s == 0.0) throw DomainError("division by zero", s);
    for (auto& v : c_) v /= s;
    return *this;
  }

  Jet& operator+=(const Jet& o) {
    check_compatible(o);
    if (o.order_ < order_) *this = truncated(o.order_);
    for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    check_compatible(o);
    if (o.order_ < order_) *this = truncated(o.order_);
    for (std::size_t k = 0; k < c_.size(); ++k) c_[k] -= o.c_[k];
    return *this;
  }

  friend Jet operator*(const Jet& a, const Jet& b) {
    a.check_compatible(b);
    Jet r(*a.set_, std::min(a.order_, b.order_));
    const double* pa = a.c_.data();
    const double* pb = b.c_.data();
    double* out = r.c_.data();
    for (const auto& p : a.set_->products(r.order_)) out[p.out] += pa[p.lhs] * pb[p.rhs];
    return r;
  }

  Jet& operator*=(const Jet& o) { return *this = *this * o; }

  /// d f / d x_var. The result is valid to one order less.
  friend Jet derivative(const Jet& f, int var) {
    if (f.order_ < 1) throw Error("cannot differentiate a jet of order 0");
    if (var < 0 || var >= f.num_vars()) throw Error("derivative variable out of range");
    Jet r(*f.set_, f.order_ - 1);
    for (const auto& s : f.set_->shifts(var, r.order_)) r.c_[s.dst] = s.factor * f.c_[s.src];
    return r;
  }

  /// a / b by the recurrence q * b = a, solved degree by degree. The value is
  /// exactly a0 / b0.
  friend Jet quotient(const Jet& a, const Jet& b) {
    a.check_compatible(b);
    const double b0 = b.c_[0];
    if (b0 == 0.0) throw DomainError("division by a quantity with zero value", b0);
    Jet q(*a.set_, std::min(a.order_, b.order_));
    const auto& set = *a.set_;
    std::copy_n(a.c_.begin(), q.c_.size(), q.c_.begin());
    std::size_t p = 0;
    const auto products = set.products(q.order_);
    for (int d = 0; d <= q.order_; ++d) {
      for (; p < products.size() && set.degree(products[p].out) == d; ++p) {
        const auto& t = products[p];
        if (t.rhs == 0) continue;
        q.c_[t.out] -= q.c_[t.lhs] * b.c_[t.rhs];
      }
      for (std::size_t k = (d == 0 ? 0 : set.size_upto(d - 1)); k < set.size_upto(d); ++k) q.c_[k] /= b0;
    }
    return q;
  }

  /// Compose a univariate function given by its Taylor coefficients
  /// t_k = f^(k)(a0)/k! at a0 = value of the argument.
  friend Jet compose_univariate(const Jet& arg, const std::array<double, kJetOrder + 1>& t) {
    Jet h = arg;
    h.c_[0] = 0.0;
    Jet r = Jet::constant_like(arg, t[arg.order_]);
    for (int k = arg.order_ - 1; k >= 0; --k) {
      r = r * h;
      r.c_[0] += t[k];
    }
    return r;
  }

 private:
  Jet(const MultiIndexSet& set, int order)
      : set_(&set), order_(order), c_(set.size_upto(order), 0.0) {}

  static Jet constant_like(const Jet& proto, double v) {
    Jet r(*proto.set_, proto.order_);
    r.c_[0] = v;
    return r;
  }

  void check_compatible(const Jet& o) const {
    if (set_ != o.set_) throw Error("jets over different numbers of variables");
  }

  const MultiIndexSet* set_ = nullptr;
  int order_ = kJetOrder;
  std::vector<double> c_;
};

inline Jet operator+(Jet a, const Jet& b) { return a += b; }
inline Jet operator-(Jet a, const Jet& b) { return a -= b; }
inline Jet operator+(Jet a, double s) { return a += s; }
inline Jet operator+(double s, Jet a) { return a += s; }
inline Jet operator-(Jet a, double s) { return a -= s; }
inline Jet operator-(double s, const Jet& a) { return -a + s; }
inline Jet operator*(Jet a, double s) { return a *= s; }
inline Jet operator*(double s, Jet a) { return a *= s; }
inline Jet operator/(Jet a, double s) { return a /= s; }

inline Jet reciprocal(const Jet& a) {
  const double x = a.value();
  if (x == 0.0) throw DomainError("division by a quantity with zero value", x);
  std::array<double, kJetOrder + 1> t{};
  double p = 1.0 / x;
  for (int k = 0; k <= kJetOrder; ++k) {
    t[k] = (k % 2 == 0 ? p : -p);
    p /= x;
  }
  return compose_univariate(a, t);
}

inline Jet operator/(const Jet& a, const Jet& b) { return quotient(a, b); }
inline Jet operator/(double s, const Jet& b) { return quotient(Jet::constant(s, b.num_vars()), b); }

inline Jet exp(const Jet& a) {
  const double e = std::exp(a.value());
  std::array<double, kJetOrder + 1> t{};
  double f = 1.0;
  for (int k = 0; k <= kJetOrder; ++k) {
    if (k > 0) f *= k;
    t[k] = e / f;
  }
  return compose_univariate(a, t);
}

inline Jet log(const Jet& a) {
  const double x = a.value();
  if (!(x > 0.0)) throw DomainError("ln of non-positive value " + std::to_string(x), x);
  std::array<double, kJetOrder + 1> t{};
  t[0] = std::log(x);
  double p = 1.0;
  for (int k = 1; k <= kJetOrder; ++k) {
    p /= x;
    t[k] = (k % 2 == 1 ? p : -p) / k;
  }
  return compose_univariate(a, t);
}

inline Jet sin(const Jet& a) {
  const double s = std::sin(a.value()), c = std::cos(a.value());
  return compose_univariate(a, {s, c, -s / 2.0, -c / 6.0, s / 24.0});
}

inline Jet cos(const Jet& a) {
  const double s = std::sin(a.value()), c = std::cos(a.value());
  return compose_univariate(a, {c, -s, -c / 2.0, s / 6.0, c / 24.0});
}

namespace detail {

inline bool is_integer(double p) { return std::isfinite(p) && p == std::floor(p) && std::abs(p) < 1e9; }

// Shared by the real and jet paths so both perform the same multiplications.
template <class T>
T integer_power(const T& a, long n, T one) {
  if (n < 0) return 1.0 / integer_power(a, -n, one);
  T result = one;
  T base = a;
  while (n > 0) {
    if (n & 1) result = result * base;
    n >>= 1;
    if (n > 0) base = base * base;
  }
  return result;
}

}  // namespace detail

/// a^p for real p. Integer exponents are evaluated by repeated multiplication
/// so they stay exact at negative or zero bases.
inline Jet pow(const Jet& a, double p) {
  if (detail::is_integer(p)) {
    if (p < 0 && a.value() == 0.0) throw DomainError("negative power of zero", a.value());
    return detail::integer_power(a, static_cast<long>(p), Jet::constant(1.0, a.num_vars()).truncated(a.order()));
  }
  const double x = a.value();
  if (!(x > 0.0))
    throw DomainError("non-integer power of non-positive value " + std::to_string(x), x);
  std::array<double, kJetOrder + 1> t{};
  double coeff = 1.0;
  for (int k = 0; k <= kJetOrder; ++k) {
    t[k] = coeff * std::pow(x, p - k);
    coeff *= (p - k) / (k + 1);
  }
  return compose_univariate(a, t);
}

inline Jet sqrt(const Jet& a) {
  const double x = a.value();
  if (!(x > 0.0)) throw DomainError("sqrt of non-positive value " + std::to_string(x), x);
  std::array<double, kJetOrder + 1> t{};
  double coeff = std::sqrt(x);
  for (int k = 0; k <= kJetOrder; ++k) {
    t[k] = coeff;
    coeff *= (0.5 - k) / ((k + 1) * x);
  }
  return compose_univariate(a, t);
}

inline Jet pow(double a, const Jet& p) {
  if (!(a > 0.0)) throw DomainError("power of non-positive base with variable exponent", a);
  const double v = std::pow(a, p.value()), l = std::log(a);
  std::array<double, kJetOrder + 1> t{};
  double c = v;
  for (int k = 0; k <= kJetOrder; ++k) {
    t[k] = c;
    c *= l / (k + 1);
  }
  return compose_univariate(p, t);
}

/// a^p with a variable exponent, written as a^p0 * exp((p - p0) ln a) so the
/// value matches the real evaluation exactly.
inline Jet pow(const Jet& a, const Jet& p) {
  if (p.is_constant()) return pow(a, p.value());
  return pow(a, p.value()) * exp((p - p.value()) * log(a));
}

/// Evaluates outer jets (in n variables, expanded around y0) at inner jets
/// (n jets in m variables whose values are y0). The monomials
/// prod_a (inner_a - y0_a)^k_a are built once and shared by every outer jet.
class JetComposer {
 public:
  JetComposer(std::span<const Jet> inner, int degree)
      : outer_set_(&MultiIndexSet::get(static_cast<int>(inner.size()))), degree_(degree) {
    if (inner.empty()) throw Error("composition needs at least one inner jet");
    std::vector<Jet> delta;
    delta.reserve(inner.size());
    inner_order_ = kJetOrder;
    for (const auto& j : inner) {
      Jet d = j;
      d -= j.value();
      inner_order_ = std::min(inner_order_, j.order());
      delta.push_back(std::move(d));
    }
    const int m = inner.front().num_vars();
    monomials_.reserve(outer_set_->size_upto(degree));
    monomials_.push_back(Jet::constant(1.0, m).truncated(inner_order_));
    for (std::size_t k = 1; k < outer_set_->size_upto(degree); ++k) {
      MultiIndex alpha = outer_set_->index(k);
      int a = 0;
      while (alpha[a] == 0) ++a;
      alpha[a] -= 1;
      monomials_.push_back(monomials_[outer_set_->position(alpha)] * delta[a]);
    }
  }

  Jet compose(const Jet& outer) const {
    if (&outer.index_set() != outer_set_) throw Error("outer jet dimension mismatch in composition");
    const int order = std::min({outer.order(), inner_order_, degree_});
    Jet r = monomials_[0].truncated(order) * outer.value();
    for (std::size_t k = 1; k < outer_set_->size_upto(order); ++k) {
      const double c = outer.taylor(k);
      if (c == 0.0) continue;
      Jet term = monomials_[k].truncated(order);
      term *= c;
      r += term;
    }
    return r;
  }

 private:
  const MultiIndexSet* outer_set_;
  int degree_;
  int inner_order_ = kJetOrder;
  std::vector<Jet> monomials_;
};

}  // namespace bitension
