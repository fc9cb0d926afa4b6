#pragma once

// Moment-map symbol expressions over phase space (t, phi, xi_t, xi_phi).
//
//   expr   := term (('+' | '-') term)*
//   term   := factor (('*' | '/') factor)*
//   factor := atom ('^' uint)?
//   atom   := number | ident | builtin '(' expr ')' | '(' expr ')' | '-' atom
//
// builtins: sin cos sqrt abs f fp (f, fp: the surface profile and its derivative).

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <type_traits>
#include <utility>
#include <variant>

#include "qcigeo/error.hpp"
#include "qcigeo/geometry.hpp"

namespace qcigeo {

/// A point of T*M in the (t, phi) chart.
struct PhasePoint {
  double t = 0.0;
  double phi = 0.0;
  double xi_t = 0.0;
  double xi_phi = 0.0;
};

enum class Variable { t, phi, xi_t, xi_phi };
enum class Builtin { sin, cos, sqrt, abs, f, fp };
enum class BinaryOp { add, sub, mul, div };

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

struct NumberNode {
  double value;
};
struct VariableNode {
  Variable var;
};
struct CallNode {
  Builtin fn;
  ExprPtr arg;
};
struct BinaryNode {
  BinaryOp op;
  ExprPtr lhs;
  ExprPtr rhs;
};
struct PowerNode {
  ExprPtr base;
  unsigned exponent;
};
struct NegateNode {
  ExprPtr operand;
};

struct ExprNode {
  std::variant<NumberNode, VariableNode, CallNode, BinaryNode, PowerNode, NegateNode> node;
};

namespace detail {

inline std::optional<Variable> variable_from_name(std::string_view name) {
  if (name == "t") return Variable::t;
  if (name == "phi") return Variable::phi;
  if (name == "xi_t") return Variable::xi_t;
  if (name == "xi_phi") return Variable::xi_phi;
  return std::nullopt;
}

inline std::optional<Builtin> builtin_from_name(std::string_view name) {
  if (name == "sin") return Builtin::sin;
  if (name == "cos") return Builtin::cos;
  if (name == "sqrt") return Builtin::sqrt;
  if (name == "abs") return Builtin::abs;
  if (name == "f") return Builtin::f;
  if (name == "fp") return Builtin::fp;
  return std::nullopt;
}

inline const char* name_of(Variable v) {
  switch (v) {
    case Variable::t: return "t";
    case Variable::phi: return "phi";
    case Variable::xi_t: return "xi_t";
    case Variable::xi_phi: return "xi_phi";
  }
  return "?";
}

inline const char* name_of(Builtin b) {
  switch (b) {
    case Builtin::sin: return "sin";
    case Builtin::cos: return "cos";
    case Builtin::sqrt: return "sqrt";
    case Builtin::abs: return "abs";
    case Builtin::f: return "f";
    case Builtin::fp: return "fp";
  }
  return "?";
}

template <class T>
ExprPtr make_node(T value) {
  return std::make_shared<const ExprNode>(ExprNode{std::move(value)});
}

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  ExprPtr parse() {
    skip_ws();
    if (pos_ == src_.size()) fail("empty expression");
    ExprPtr e = expr();
    skip_ws();
    if (pos_ != src_.size()) fail("unexpected character '" + std::string(1, src_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what, ErrorKind kind = ErrorKind::syntax) const {
    throw SyntaxError(kind, pos_ + 1, what);
  }

  void skip_ws() {
    while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' ||
                                  src_[pos_] == '\r'))
      ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  ExprPtr expr() {
    ExprPtr lhs = term();
    for (;;) {
      if (accept('+')) lhs = make_node(BinaryNode{BinaryOp::add, lhs, term()});
      else if (accept('-')) lhs = make_node(BinaryNode{BinaryOp::sub, lhs, term()});
      else return lhs;
    }
  }

  ExprPtr term() {
    ExprPtr lhs = factor();
    for (;;) {
      if (accept('*')) lhs = make_node(BinaryNode{BinaryOp::mul, lhs, factor()});
      else if (accept('/')) lhs = make_node(BinaryNode{BinaryOp::div, lhs, factor()});
      else return lhs;
    }
  }

  ExprPtr factor() {
    ExprPtr base = atom();
    if (!accept('^')) return base;
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    if (pos_ == start) fail("exponent must be a non-negative integer");
    if (pos_ < src_.size() && (src_[pos_] == '.' || src_[pos_] == 'e' || src_[pos_] == 'E'))
      fail("exponent must be a non-negative integer");
    unsigned exponent = 0;
    const auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, exponent);
    if (ec != std::errc{}) {
      pos_ = start;
      fail("exponent out of range");
    }
    return make_node(PowerNode{base, exponent});
  }

  ExprPtr atom() {
    skip_ws();
    if (pos_ == src_.size()) fail("unexpected end of input");
    const char c = src_[pos_];
    if (c == '-') {
      ++pos_;
      return make_node(NegateNode{atom()});
    }
    if (c == '(') {
      ++pos_;
      ExprPtr inner = expr();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  ExprPtr number() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.'))
      ++pos_;
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < src_.size() && (src_[look] == '+' || src_[look] == '-')) ++look;
      if (look < src_.size() && std::isdigit(static_cast<unsigned char>(src_[look]))) {
        pos_ = look;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      }
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, value);
    if (ec != std::errc{} || ptr != src_.data() + pos_) {
      pos_ = start;
      fail("malformed number");
    }
    return make_node(NumberNode{value});
  }

  ExprPtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      ++pos_;
    const std::string_view name = src_.substr(start, pos_ - start);
    skip_ws();
    const bool call = pos_ < src_.size() && src_[pos_] == '(';
    if (call) {
      const auto fn = builtin_from_name(name);
      if (!fn) {
        pos_ = start;
        fail("unknown function '" + std::string(name) + "'", ErrorKind::unknown_identifier);
      }
      ++pos_;
      ExprPtr arg = expr();
      if (!accept(')')) fail("expected ')'");
      return make_node(CallNode{*fn, arg});
    }
    const auto var = variable_from_name(name);
    if (!var) {
      pos_ = start;
      if (builtin_from_name(name)) fail("builtin '" + std::string(name) + "' needs an argument list");
      fail("unknown identifier '" + std::string(name) + "'", ErrorKind::unknown_identifier);
    }
    return make_node(VariableNode{*var});
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

// Precedence levels for printing: 1 additive, 2 multiplicative, 3 factor, 4 atom.
inline int precedence(const ExprNode& n) {
  if (const auto* b = std::get_if<BinaryNode>(&n.node))
    return (b->op == BinaryOp::add || b->op == BinaryOp::sub) ? 1 : 2;
  if (std::holds_alternative<PowerNode>(n.node)) return 3;
  return 4;
}

inline void print(const ExprNode& n, std::string& out);

inline void print_at(const ExprNode& n, int min_prec, std::string& out) {
  if (precedence(n) < min_prec) {
    out += '(';
    print(n, out);
    out += ')';
  } else {
    print(n, out);
  }
}

inline void print(const ExprNode& n, std::string& out) {
  std::visit(
      [&out](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, NumberNode>) {
          char buf[64];
          const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v.value);
          out.append(buf, ptr);
        } else if constexpr (std::is_same_v<T, VariableNode>) {
          out += name_of(v.var);
        } else if constexpr (std::is_same_v<T, CallNode>) {
          out += name_of(v.fn);
          out += '(';
          print(*v.arg, out);
          out += ')';
        } else if constexpr (std::is_same_v<T, BinaryNode>) {
          const bool additive = v.op == BinaryOp::add || v.op == BinaryOp::sub;
          const int level = additive ? 1 : 2;
          print_at(*v.lhs, level, out);
          switch (v.op) {
            case BinaryOp::add: out += " + "; break;
            case BinaryOp::sub: out += " - "; break;
            case BinaryOp::mul: out += " * "; break;
            case BinaryOp::div: out += " / "; break;
          }
          print_at(*v.rhs, level + 1, out);
        } else if constexpr (std::is_same_v<T, PowerNode>) {
          print_at(*v.base, 4, out);
          out += '^';
          out += std::to_string(v.exponent);
        } else if constexpr (std::is_same_v<T, NegateNode>) {
          out += '-';
          print_at(*v.operand, 4, out);
        }
      },
      n.node);
}

inline bool structurally_equal(const ExprNode& a, const ExprNode& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      [&b](const auto& va) -> bool {
        using T = std::decay_t<decltype(va)>;
        const T& vb = std::get<T>(b.node);
        if constexpr (std::is_same_v<T, NumberNode>) return va.value == vb.value;
        else if constexpr (std::is_same_v<T, VariableNode>) return va.var == vb.var;
        else if constexpr (std::is_same_v<T, CallNode>)
          return va.fn == vb.fn && structurally_equal(*va.arg, *vb.arg);
        else if constexpr (std::is_same_v<T, BinaryNode>)
          return va.op == vb.op && structurally_equal(*va.lhs, *vb.lhs) &&
                 structurally_equal(*va.rhs, *vb.rhs);
        else if constexpr (std::is_same_v<T, PowerNode>)
          return va.exponent == vb.exponent && structurally_equal(*va.base, *vb.base);
        else
          return structurally_equal(*va.operand, *vb.operand);
      },
      a.node);
}

inline double ipow(double base, unsigned exponent) {
  double result = 1.0;
  while (exponent) {
    if (exponent & 1u) result *= base;
    base *= base;
    exponent >>= 1u;
  }
  return result;
}

inline double evaluate(const ExprNode& n, const PhasePoint& x, const ProfileFunction& surface);

inline std::string printed(const ExprNode& n) {
  std::string s;
  print(n, s);
  return s;
}

inline double evaluate(const ExprNode& n, const PhasePoint& x, const ProfileFunction& surface) {
  return std::visit(
      [&](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, NumberNode>) {
          return v.value;
        } else if constexpr (std::is_same_v<T, VariableNode>) {
          switch (v.var) {
            case Variable::t: return x.t;
            case Variable::phi: return x.phi;
            case Variable::xi_t: return x.xi_t;
            case Variable::xi_phi: return x.xi_phi;
          }
          return 0.0;
        } else if constexpr (std::is_same_v<T, CallNode>) {
          const double a = evaluate(*v.arg, x, surface);
          switch (v.fn) {
            case Builtin::sin: return std::sin(a);
            case Builtin::cos: return std::cos(a);
            case Builtin::abs: return std::abs(a);
            case Builtin::sqrt:
              if (a < 0.0)
                throw Error(ErrorKind::domain, "negative argument to sqrt in '" + printed(n) + "'");
              return std::sqrt(a);
            case Builtin::f:
              if (!(std::abs(a) <= 1.0))
                throw Error(ErrorKind::domain, "profile evaluated outside [-1, 1] in '" + printed(n) + "'");
              return surface.f(a);
            case Builtin::fp:
              if (!(std::abs(a) < 1.0))
                throw Error(ErrorKind::domain,
                            "profile derivative evaluated outside (-1, 1) in '" + printed(n) + "'");
              return surface.fp(a);
          }
          return 0.0;
        } else if constexpr (std::is_same_v<T, BinaryNode>) {
          const double a = evaluate(*v.lhs, x, surface);
          const double b = evaluate(*v.rhs, x, surface);
          switch (v.op) {
            case BinaryOp::add: return a + b;
            case BinaryOp::sub: return a - b;
            case BinaryOp::mul: return a * b;
            case BinaryOp::div:
              if (b == 0.0) throw Error(ErrorKind::domain, "division by zero in '" + printed(n) + "'");
              return a / b;
          }
          return 0.0;
        } else if constexpr (std::is_same_v<T, PowerNode>) {
          return ipow(evaluate(*v.base, x, surface), v.exponent);
        } else {
          return -evaluate(*v.operand, x, surface);
        }
      },
      n.node);
}

}  // namespace detail

/// Parsed, immutable symbol expression.
class SymbolExpr {
 public:
  const ExprNode& root() const noexcept { return *root_; }
  /// Canonical printout; parses back to a structurally identical tree.
  std::string to_string() const { return detail::printed(*root_); }

  friend SymbolExpr parse_expr(std::string_view src);

 private:
  explicit SymbolExpr(ExprPtr root) : root_(std::move(root)) {}
  ExprPtr root_;
};

inline bool structurally_equal(const SymbolExpr& a, const SymbolExpr& b) {
  return detail::structurally_equal(a.root(), b.root());
}

inline SymbolExpr parse_expr(std::string_view src) {
  return SymbolExpr(detail::Parser(src).parse());
}

inline double eval_expr(const SymbolExpr& e, const PhasePoint& env, const ProfileFunction& surface) {
  return detail::evaluate(e.root(), env, surface);
}

/// Built-in symbols of the surface of revolution.
enum class BuiltinSymbol {
  kinetic,           ///< xi_t^2 + xi_phi^2 / f(t)^2
  angular_momentum,  ///< xi_phi
};

inline constexpr std::string_view builtin_p1_text = "xi_t^2 + xi_phi^2 / f(t)^2";
inline constexpr std::string_view builtin_p2_text = "xi_phi";

/// Either a built-in evaluator or a parsed expression.
class SymbolFunction {
 public:
  SymbolFunction(BuiltinSymbol b) : impl_(b) {}  // NOLINT(google-explicit-constructor)
  SymbolFunction(SymbolExpr e) : impl_(std::move(e)) {}  // NOLINT(google-explicit-constructor)

  bool is_builtin() const noexcept { return std::holds_alternative<BuiltinSymbol>(impl_); }
  std::optional<BuiltinSymbol> builtin() const noexcept {
    if (const auto* b = std::get_if<BuiltinSymbol>(&impl_)) return *b;
    return std::nullopt;
  }
  std::string to_string() const {
    if (const auto* b = std::get_if<BuiltinSymbol>(&impl_))
      return std::string(*b == BuiltinSymbol::kinetic ? builtin_p1_text : builtin_p2_text);
    return std::get<SymbolExpr>(impl_).to_string();
  }

  double operator()(const PhasePoint& x, const ProfileFunction& surface) const {
    if (const auto* b = std::get_if<BuiltinSymbol>(&impl_)) {
      if (*b == BuiltinSymbol::angular_momentum) return x.xi_phi;
      const double f = surface.f(x.t);
      return x.xi_t * x.xi_t + x.xi_phi * x.xi_phi / (f * f);
    }
    return eval_expr(std::get<SymbolExpr>(impl_), x, surface);
  }

 private:
  std::variant<BuiltinSymbol, SymbolExpr> impl_;
};

/// Moment map P = (p1, p2) on T*M for a given surface.
struct MomentMap {
  SymbolFunction p1;
  SymbolFunction p2;
  ProfileFunction surface;

  double eval_p1(const PhasePoint& x) const { return p1(x, surface); }
  double eval_p2(const PhasePoint& x) const { return p2(x, surface); }
};

inline MomentMap builtin_moment_map(const ProfileFunction& surface) {
  return {BuiltinSymbol::kinetic, BuiltinSymbol::angular_momentum, surface};
}

/// Moment map with optional expression overrides; absent entries use the built-ins.
inline MomentMap make_moment_map(const ProfileFunction& surface,
                                 const std::optional<std::string>& p1_src,
                                 const std::optional<std::string>& p2_src) {
  MomentMap map = builtin_moment_map(surface);
  if (p1_src) map.p1 = parse_expr(*p1_src);
  if (p2_src) map.p2 = parse_expr(*p2_src);
  return map;
}

}  // namespace qcigeo
