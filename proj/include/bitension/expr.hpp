#pragma once

/**
 * @file expr.hpp
 * @brief Scalar expression language used for metric, map, field and factor
 * components.
 *
 * Grammar (lowest to highest binding):
 *
 *     expr    := term (('+' | '-') term)*
 *     term    := unary (('*' | '/') unary)*
 *     unary   := '-' unary | power
 *     power   := primary ('^' unary)?          right associative
 *     primary := number | identifier | identifier '(' args ')' | '(' expr ')'
 *
 * so "-x^2" is -(x^2) and "2^-1" is 2^(-1). Functions: exp, ln, sin, cos,
 * sqrt, pow(a, b). Identifiers are [a-zA-Z_][a-zA-Z0-9_]*; whether a name is a
 * coordinate or a parameter is decided by the evaluation context. There is no
 * implicit multiplication.
 *
 * Expressions are immutable and evaluate over any scalar type providing the
 * elementary operations (double and Jet).
 */

#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "bitension/errors.hpp"
#include "bitension/jet.hpp"

namespace bitension {

using Params = std::map<std::string, double, std::less<>>;

enum class TokenKind { Number, Identifier, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma, End };

struct Token {
  TokenKind kind;
  std::string text;
  double number = 0.0;
  std::size_t offset = 0;
};

inline std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto is_ident_start = [](char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; };
  auto is_ident = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; };
  auto is_digit = [](char c) { return c >= '0' && c <= '9'; };
  while (i < src.size()) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (is_digit(c) || (c == '.' && i + 1 < src.size() && is_digit(src[i + 1]))) {
      while (i < src.size() && is_digit(src[i])) ++i;
      if (i < src.size() && src[i] == '.') {
        ++i;
        while (i < src.size() && is_digit(src[i])) ++i;
      }
      if (i < src.size() && (src[i] == 'e' || src[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < src.size() && (src[j] == '+' || src[j] == '-')) ++j;
        if (j < src.size() && is_digit(src[j])) {
          i = j;
          while (i < src.size() && is_digit(src[i])) ++i;
        }
      }
      Token t{TokenKind::Number, std::string(src.substr(start, i - start)), 0.0, start};
      t.number = std::strtod(t.text.c_str(), nullptr);
      out.push_back(std::move(t));
      continue;
    }
    if (is_ident_start(c)) {
      while (i < src.size() && is_ident(src[i])) ++i;
      out.push_back({TokenKind::Identifier, std::string(src.substr(start, i - start)), 0.0, start});
      continue;
    }
    TokenKind kind;
    switch (c) {
      case '+': kind = TokenKind::Plus; break;
      case '-': kind = TokenKind::Minus; break;
      case '*': kind = TokenKind::Star; break;
      case '/': kind = TokenKind::Slash; break;
      case '^': kind = TokenKind::Caret; break;
      case '(': kind = TokenKind::LParen; break;
      case ')': kind = TokenKind::RParen; break;
      case ',': kind = TokenKind::Comma; break;
      default:
        throw LexError(std::string("illegal character '") + c + "'", i);
    }
    out.push_back({kind, std::string(1, c), 0.0, i});
    ++i;
  }
  out.push_back({TokenKind::End, "", 0.0, src.size()});
  return out;
}

enum class NodeKind { Constant, Symbol, Negate, Add, Sub, Mul, Div, Pow, Call };
enum class Function { Exp, Ln, Sin, Cos, Sqrt, Pow };

inline const char* function_name(Function f) {
  switch (f) {
    case Function::Exp: return "exp";
    case Function::Ln: return "ln";
    case Function::Sin: return "sin";
    case Function::Cos: return "cos";
    case Function::Sqrt: return "sqrt";
    case Function::Pow: return "pow";
  }
  return "?";
}

inline bool lookup_function(std::string_view name, Function& f, int& arity) {
  static const std::pair<std::string_view, Function> table[] = {
      {"exp", Function::Exp}, {"ln", Function::Ln},     {"sin", Function::Sin},
      {"cos", Function::Cos}, {"sqrt", Function::Sqrt}, {"pow", Function::Pow}};
  for (const auto& [n, fn] : table) {
    if (n == name) {
      f = fn;
      arity = fn == Function::Pow ? 2 : 1;
      return true;
    }
  }
  return false;
}

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  NodeKind kind;
  double value = 0.0;
  std::string name;
  Function fn = Function::Exp;
  std::vector<NodePtr> children;
};

class Expr {
 public:
  Expr() : Expr(0.0) {}
  Expr(double v) : root_(make_constant(v)) {}  // NOLINT: implicit from literals is intended
  explicit Expr(NodePtr root) : root_(std::move(root)) {}

  static Expr parse(std::string_view src);
  static Expr symbol(std::string name) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Symbol;
    n->name = std::move(name);
    return Expr(std::move(n));
  }
  static Expr call(Function f, std::vector<Expr> args) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Call;
    n->fn = f;
    for (auto& a : args) n->children.push_back(a.root_);
    return Expr(std::move(n));
  }
  static Expr binary(NodeKind kind, const Expr& a, const Expr& b) {
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->children = {a.root_, b.root_};
    return Expr(std::move(n));
  }
  static Expr negate(const Expr& a) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Negate;
    n->children = {a.root_};
    return Expr(std::move(n));
  }

  const Node& root() const { return *root_; }
  const NodePtr& node() const { return root_; }

  /// Canonical printable form; parse(str()) reproduces the tree.
  std::string str() const;

  /// Every identifier appearing in the expression.
  std::set<std::string> symbols() const {
    std::set<std::string> out;
    collect(*root_, out);
    return out;
  }

  friend bool structurally_equal(const Expr& a, const Expr& b) { return equal_nodes(*a.root_, *b.root_); }

  friend Expr operator+(const Expr& a, const Expr& b) { return binary(NodeKind::Add, a, b); }
  friend Expr operator-(const Expr& a, const Expr& b) { return binary(NodeKind::Sub, a, b); }
  friend Expr operator*(const Expr& a, const Expr& b) { return binary(NodeKind::Mul, a, b); }
  friend Expr operator/(const Expr& a, const Expr& b) { return binary(NodeKind::Div, a, b); }
  friend Expr operator-(const Expr& a) { return negate(a); }
  friend Expr pow(const Expr& a, const Expr& b) { return binary(NodeKind::Pow, a, b); }
  friend Expr exp(const Expr& a) { return call(Function::Exp, {a}); }
  friend Expr log(const Expr& a) { return call(Function::Ln, {a}); }
  friend Expr sin(const Expr& a) { return call(Function::Sin, {a}); }
  friend Expr cos(const Expr& a) { return call(Function::Cos, {a}); }
  friend Expr sqrt(const Expr& a) { return call(Function::Sqrt, {a}); }

 private:
  // Constants in a tree are non-negative; a negative literal becomes
  // negate(constant) so that printing and re-parsing is the identity.
  static NodePtr make_constant(double v) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Constant;
    n->value = std::abs(v);
    if (!std::signbit(v)) return n;
    auto neg = std::make_shared<Node>();
    neg->kind = NodeKind::Negate;
    neg->children = {n};
    return neg;
  }

  static void collect(const Node& n, std::set<std::string>& out) {
    if (n.kind == NodeKind::Symbol) out.insert(n.name);
    for (const auto& c : n.children) collect(*c, out);
  }

  static bool equal_nodes(const Node& a, const Node& b) {
    if (a.kind != b.kind || a.children.size() != b.children.size()) return false;
    if (a.kind == NodeKind::Constant && a.value != b.value) return false;
    if (a.kind == NodeKind::Symbol && a.name != b.name) return false;
    if (a.kind == NodeKind::Call && a.fn != b.fn) return false;
    for (std::size_t i = 0; i < a.children.size(); ++i)
      if (!equal_nodes(*a.children[i], *b.children[i])) return false;
    return true;
  }

  NodePtr root_;
};

namespace detail {

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  Expr parse_all() {
    Expr e = expr();
    if (peek().kind != TokenKind::End) {
      if (peek().kind == TokenKind::RParen) throw SyntaxError("unbalanced ')'", peek().offset);
      throw SyntaxError("unexpected token '" + peek().text + "'", peek().offset);
    }
    return e;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_++]; }
  bool accept(TokenKind k) {
    if (peek().kind != k) return false;
    ++pos_;
    return true;
  }

  Expr expr() {
    Expr lhs = term();
    for (;;) {
      if (accept(TokenKind::Plus)) lhs = lhs + term();
      else if (accept(TokenKind::Minus)) lhs = lhs - term();
      else return lhs;
    }
  }

  Expr term() {
    Expr lhs = unary();
    for (;;) {
      if (accept(TokenKind::Star)) lhs = lhs * unary();
      else if (accept(TokenKind::Slash)) lhs = lhs / unary();
      else return lhs;
    }
  }

  Expr unary() {
    if (accept(TokenKind::Minus)) return -unary();
    return power();
  }

  Expr power() {
    Expr base = primary();
    if (accept(TokenKind::Caret)) return pow(base, unary());
    return base;
  }

  Expr primary() {
    const Token& t = next();
    switch (t.kind) {
      case TokenKind::Number:
        return Expr(t.number);
      case TokenKind::Identifier: {
        if (peek().kind != TokenKind::LParen) return Expr::symbol(t.text);
        Function fn;
        int arity = 0;
        if (!lookup_function(t.text, fn, arity)) throw SyntaxError("unknown function '" + t.text + "'", t.offset);
        next();
        std::vector<Expr> args;
        if (peek().kind != TokenKind::RParen) {
          args.push_back(expr());
          while (accept(TokenKind::Comma)) args.push_back(expr());
        }
        if (!accept(TokenKind::RParen)) throw SyntaxError("expected ')' to close call", peek().offset);
        if (static_cast<int>(args.size()) != arity)
          throw SyntaxError("function '" + t.text + "' expects " + std::to_string(arity) + " argument(s), got " +
                                std::to_string(args.size()),
                            t.offset);
        if (fn == Function::Pow) return pow(args[0], args[1]);
        return Expr::call(fn, std::move(args));
      }
      case TokenKind::LParen: {
        Expr inner = expr();
        if (!accept(TokenKind::RParen)) throw SyntaxError("unbalanced '('", t.offset);
        return inner;
      }
      case TokenKind::End:
        throw SyntaxError("unexpected end of expression", t.offset);
      default:
        throw SyntaxError("unexpected token '" + t.text + "'", t.offset);
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

// Binding strength used by the printer: higher binds tighter.
inline int binding(const Node& n) {
  switch (n.kind) {
    case NodeKind::Add:
    case NodeKind::Sub: return 1;
    case NodeKind::Mul:
    case NodeKind::Div: return 2;
    case NodeKind::Negate: return 3;
    case NodeKind::Pow: return 4;
    default: return 5;
  }
}

inline std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  // A bare "inf"/"nan" would lex as an identifier.
  if (!std::isfinite(v)) throw Error("cannot print non-finite constant");
  return s;
}

inline void print(const Node& n, std::string& out) {
  auto wrap = [&out](const Node& c, bool paren) {
    if (paren) out += '(';
    print(c, out);
    if (paren) out += ')';
  };
  switch (n.kind) {
    case NodeKind::Constant: out += format_number(n.value); return;
    case NodeKind::Symbol: out += n.name; return;
    case NodeKind::Negate:
      out += '-';
      wrap(*n.children[0], binding(*n.children[0]) < 3);
      return;
    case NodeKind::Pow:
      wrap(*n.children[0], binding(*n.children[0]) < 5);
      out += '^';
      wrap(*n.children[1], binding(*n.children[1]) < 3);
      return;
    case NodeKind::Call:
      out += function_name(n.fn);
      out += '(';
      for (std::size_t i = 0; i < n.children.size(); ++i) {
        if (i) out += ", ";
        print(*n.children[i], out);
      }
      out += ')';
      return;
    default: {
      const int level = binding(n);
      const char* op = n.kind == NodeKind::Add   ? " + "
                       : n.kind == NodeKind::Sub ? " - "
                       : n.kind == NodeKind::Mul ? "*"
                                                 : "/";
      wrap(*n.children[0], binding(*n.children[0]) < level);
      out += op;
      wrap(*n.children[1], binding(*n.children[1]) <= level);
    }
  }
}

}  // namespace detail

inline Expr Expr::parse(std::string_view src) { return detail::Parser(tokenize(src)).parse_all(); }

inline std::string Expr::str() const {
  std::string out;
  detail::print(*root_, out);
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

/// Bindings for evaluation. Variables carry the scalar type (double or Jet);
/// parameters are always real.
template <class Scalar>
struct EvalContext {
  std::map<std::string, Scalar, std::less<>> variables;
  const Params* parameters = nullptr;
  const Params* extra_parameters = nullptr;
};

namespace detail {

template <class Scalar>
using Value = std::conditional_t<std::is_same_v<Scalar, double>, std::variant<double>, std::variant<double, Scalar>>;

inline double real_pow(double a, double p) {
  if (!is_integer(p) && a < 0.0) throw DomainError("non-integer power of negative value", a);
  if (a == 0.0 && p < 0.0) throw DomainError("negative power of zero", a);
  if (is_integer(p)) return integer_power(a, static_cast<long>(p), 1.0);
  return std::pow(a, p);
}

inline double real_apply(Function f, double a) {
  switch (f) {
    case Function::Exp: return std::exp(a);
    case Function::Ln:
      if (!(a > 0.0)) throw DomainError("ln of non-positive value " + std::to_string(a), a);
      return std::log(a);
    case Function::Sin: return std::sin(a);
    case Function::Cos: return std::cos(a);
    case Function::Sqrt:
      if (!(a > 0.0) && a != 0.0) throw DomainError("sqrt of negative value " + std::to_string(a), a);
      return std::sqrt(a);
    default: throw Error("bad unary function");
  }
}

inline Jet jet_apply(Function f, const Jet& a) {
  switch (f) {
    case Function::Exp: return exp(a);
    case Function::Ln: return log(a);
    case Function::Sin: return sin(a);
    case Function::Cos: return cos(a);
    case Function::Sqrt: return sqrt(a);
    default: throw Error("bad unary function");
  }
}

template <class Scalar>
Value<Scalar> eval_node(const Node& n, const EvalContext<Scalar>& ctx);

template <class Scalar>
Value<Scalar> eval_binary(NodeKind kind, const Value<Scalar>& a, const Value<Scalar>& b) {
  return std::visit(
      [kind](const auto& x, const auto& y) -> Value<Scalar> {
        using X = std::decay_t<decltype(x)>;
        using Y = std::decay_t<decltype(y)>;
        switch (kind) {
          case NodeKind::Add: return x + y;
          case NodeKind::Sub: return x - y;
          case NodeKind::Mul: return x * y;
          case NodeKind::Div:
            if constexpr (std::is_same_v<Y, double>) {
              if (y == 0.0) throw DomainError("division by zero", y);
            }
            return x / y;
          case NodeKind::Pow:
            if constexpr (std::is_same_v<X, double> && std::is_same_v<Y, double>) {
              return real_pow(x, y);
            } else {
              return pow(x, y);
            }
          default: throw Error("bad binary node");
        }
      },
      a, b);
}

template <class Scalar>
Value<Scalar> eval_node_inner(const Node& n, const EvalContext<Scalar>& ctx) {
  switch (n.kind) {
    case NodeKind::Constant: return n.value;
    case NodeKind::Symbol: {
      if (auto it = ctx.variables.find(n.name); it != ctx.variables.end()) return it->second;
      for (const Params* p : {ctx.extra_parameters, ctx.parameters}) {
        if (!p) continue;
        if (auto it = p->find(n.name); it != p->end()) return it->second;
      }
      throw UnboundNameError(n.name);
    }
    case NodeKind::Negate:
      return std::visit([](const auto& x) -> Value<Scalar> { return -x; }, eval_node(*n.children[0], ctx));
    case NodeKind::Call: {
      if (n.fn == Function::Pow)
        return eval_binary<Scalar>(NodeKind::Pow, eval_node(*n.children[0], ctx), eval_node(*n.children[1], ctx));
      const Value<Scalar> a = eval_node(*n.children[0], ctx);
      if (const double* r = std::get_if<double>(&a)) return real_apply(n.fn, *r);
      if constexpr (std::is_same_v<Scalar, Jet>) {
        return jet_apply(n.fn, std::get<Scalar>(a));
      } else {
        return real_apply(n.fn, std::get<Scalar>(a));
      }
    }
    default:
      return eval_binary<Scalar>(n.kind, eval_node(*n.children[0], ctx), eval_node(*n.children[1], ctx));
  }
}

// Domain errors are annotated once, with the innermost failing subexpression.
template <class Scalar>
Value<Scalar> eval_node(const Node& n, const EvalContext<Scalar>& ctx) {
  try {
    return eval_node_inner(n, ctx);
  } catch (const DomainError& e) {
    const std::string what = e.what();
    if (what.find(" in `") != std::string::npos) throw;
    std::string sub;
    print(n, sub);
    throw DomainError(what + " in `" + sub + "`", e.value());
  }
}

}  // namespace detail

inline double evaluate(const Expr& e, const EvalContext<double>& ctx) {
  const auto v = detail::eval_node(e.root(), ctx);
  return std::visit([](double x) { return x; }, v);
}

/// Jet evaluation. `num_vars` sizes results that do not depend on any
/// bound variable (constants and parameter-only subexpressions).
inline Jet evaluate(const Expr& e, const EvalContext<Jet>& ctx, int num_vars) {
  const auto v = detail::eval_node(e.root(), ctx);
  if (const double* r = std::get_if<double>(&v)) return Jet::constant(*r, num_vars);
  return std::get<Jet>(v);
}

}  // namespace bitension
