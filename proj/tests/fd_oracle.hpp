#pragma once

// Test-only oracles: nested central finite differences and random smooth
// expression trees that are evaluated without going through the DSL.

#include <cmath>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "bitension/jet.hpp"

namespace oracle {

/// Fourth-order central difference d/dx_var applied recursively for each unit
/// of the multi-index.
template <class Real, class F>
Real fd_partial(const F& f, std::vector<Real> x, bitension::MultiIndex alpha, Real h) {
  int var = -1;
  for (int i = 0; i < static_cast<int>(x.size()); ++i) {
    if (alpha[i] > 0) {
      var = i;
      break;
    }
  }
  if (var < 0) return f(x);
  alpha[var] -= 1;
  auto at = [&](Real shift) {
    std::vector<Real> y = x;
    y[var] += shift;
    return fd_partial<Real>(f, y, alpha, h);
  };
  return (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12 * h);
}

inline double fd_partial(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x,
                         bitension::MultiIndex alpha, double h) {
  return fd_partial<double>(f, std::move(x), alpha, h);
}

/// Romberg table over the fourth-order stencil with steps h, h/2, h/4,
/// removing the h^4 and h^6 error terms. Evaluated in extended precision.
template <class F>
double fd_partial_extrapolated(const F& f, const std::vector<double>& x, bitension::MultiIndex alpha, double h) {
  using L = long double;
  const std::vector<L> xl(x.begin(), x.end());
  L d[3];
  for (int k = 0; k < 3; ++k) d[k] = fd_partial<L>(f, xl, alpha, static_cast<L>(h) / (1 << k));
  const L r0 = (16 * d[1] - d[0]) / 15, r1 = (16 * d[2] - d[1]) / 15;
  return static_cast<double>((64 * r1 - r0) / 63);
}

/// Random composition of smooth primitives over m variables. Every primitive is
/// wrapped so that it stays inside its domain for any real input.
class RandomTree {
 public:
  static RandomTree generate(std::mt19937_64& rng, int m, int depth) {
    RandomTree t;
    t.root_ = build(rng, m, depth);
    return t;
  }

  double eval(const std::vector<double>& x) const { return eval_node<double>(*root_, x); }
  long double eval(const std::vector<long double>& x) const { return eval_node<long double>(*root_, x); }
  bitension::Jet eval_jet(const std::vector<bitension::Jet>& x) const { return eval_node<bitension::Jet>(*root_, x); }
  std::string str() const { return print(*root_); }

 private:
  enum class Op { Var, Const, Add, Sub, Mul, Div, Sin, Cos, Exp, Log, Sqrt, Pow };
  struct Node {
    Op op;
    int var = 0;
    double c = 0.0;
    std::shared_ptr<Node> a, b;
  };

  static std::shared_ptr<Node> build(std::mt19937_64& rng, int m, int depth) {
    auto n = std::make_shared<Node>();
    std::uniform_real_distribution<double> u(0.3, 1.5);
    if (depth == 0 || rng() % 5 == 0) {
      if (rng() % 3 == 0) {
        n->op = Op::Const;
        n->c = u(rng);
      } else {
        n->op = Op::Var;
        n->var = static_cast<int>(rng() % m);
      }
      return n;
    }
    static const Op ops[] = {Op::Add, Op::Sub, Op::Mul, Op::Div, Op::Sin, Op::Cos, Op::Exp, Op::Log, Op::Sqrt, Op::Pow};
    n->op = ops[rng() % std::size(ops)];
    n->a = build(rng, m, depth - 1);
    if (n->op == Op::Add || n->op == Op::Sub || n->op == Op::Mul || n->op == Op::Div) n->b = build(rng, m, depth - 1);
    if (n->op == Op::Pow) n->c = static_cast<double>(rng() % 4) + 0.5 * static_cast<double>(rng() % 2);
    return n;
  }

  // Bounded inner transforms keep the composition numerically tame.
  template <class T>
  static T eval_node(const Node& n, const std::vector<T>& x) {
    using std::cos;
    using std::exp;
    using std::log;
    using std::sin;
    using std::sqrt;
    using bitension::cos;
    using bitension::exp;
    using bitension::log;
    using bitension::sin;
    using bitension::sqrt;
    switch (n.op) {
      case Op::Var: return x[n.var];
      case Op::Const: return x[0] * 0.0 + static_cast<std::conditional_t<std::is_floating_point_v<T>, T, double>>(n.c);
      case Op::Add: return eval_node(*n.a, x) + eval_node(*n.b, x);
      case Op::Sub: return eval_node(*n.a, x) - eval_node(*n.b, x);
      case Op::Mul: return sin(eval_node(*n.a, x)) * cos(eval_node(*n.b, x));
      case Op::Div: return sin(eval_node(*n.a, x)) / (2.0 + cos(eval_node(*n.b, x)));
      case Op::Sin: return sin(eval_node(*n.a, x));
      case Op::Cos: return cos(eval_node(*n.a, x));
      case Op::Exp: return exp(sin(eval_node(*n.a, x)));
      case Op::Log: {
        const T s = sin(eval_node(*n.a, x));
        return log(1.5 + s * s);
      }
      case Op::Sqrt: {
        const T s = sin(eval_node(*n.a, x));
        return sqrt(1.0 + s * s);
      }
      case Op::Pow: {
        const T s = sin(eval_node(*n.a, x));
        if constexpr (std::is_floating_point_v<T>) {
          const T base = 1.2 + s;
          if (bitension::detail::is_integer(n.c))
            return bitension::detail::integer_power(base, static_cast<long>(n.c), T(1));
          return std::pow(base, static_cast<T>(n.c));
        } else {
          return bitension::pow(1.2 + s, n.c);
        }
      }
    }
    return x[0];
  }

  static std::string print(const Node& n) {
    switch (n.op) {
      case Op::Var: return "x" + std::to_string(n.var);
      case Op::Const: return std::to_string(n.c);
      case Op::Add: return "(" + print(*n.a) + "+" + print(*n.b) + ")";
      case Op::Sub: return "(" + print(*n.a) + "-" + print(*n.b) + ")";
      case Op::Mul: return "sin" + print(*n.a) + "*cos" + print(*n.b);
      case Op::Div: return "sin" + print(*n.a) + "/(2+cos" + print(*n.b) + ")";
      case Op::Sin: return "sin(" + print(*n.a) + ")";
      case Op::Cos: return "cos(" + print(*n.a) + ")";
      case Op::Exp: return "exp(sin(" + print(*n.a) + "))";
      case Op::Log: return "ln(1.5+sin^2(" + print(*n.a) + "))";
      case Op::Sqrt: return "sqrt(1+sin^2(" + print(*n.a) + "))";
      case Op::Pow: return "(1.2+sin(" + print(*n.a) + "))^" + std::to_string(n.c);
    }
    return "?";
  }

  std::shared_ptr<Node> root_;
};

}  // namespace oracle
