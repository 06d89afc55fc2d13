#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <variant>

#include "tvx/errors.hpp"
#include "tvx/rational.hpp"

namespace tvx {

/// Coordinate families: x (source), a (parameters), y (target).
enum class VarClass : unsigned char { X, A, Y };

char prefix(VarClass cls);

struct Variable {
  VarClass cls;
  std::size_t index;  // 1-based

  friend bool operator==(const Variable&, const Variable&) = default;
};

std::string to_string(Variable v);

enum class BinaryOp : unsigned char { Add, Sub, Mul, Div };
enum class Function : unsigned char { Sin, Cos, Exp, Log };

struct ExprNode;

/// Immutable expression tree over coordinate variables. Copies share nodes.
class Expr {
 public:
  /// The constant 0.
  Expr();

  const ExprNode& node() const { return *node_; }

  static Expr constant(Rational value);
  static Expr variable(Variable v);
  static Expr variable(VarClass cls, std::size_t index) { return variable(Variable{cls, index}); }
  static Expr negate(Expr operand);
  static Expr binary(BinaryOp op, Expr lhs, Expr rhs);
  static Expr power(Expr base, unsigned exponent);
  static Expr call(Function fn, Expr arg);

 private:
  explicit Expr(std::shared_ptr<const ExprNode> node) : node_(std::move(node)) {}

  std::shared_ptr<const ExprNode> node_;
};

struct ConstantNode {
  Rational value;
};
struct VariableNode {
  Variable var;
};
struct NegateNode {
  Expr operand;
};
struct BinaryNode {
  BinaryOp op;
  Expr lhs;
  Expr rhs;
};
struct PowerNode {
  Expr base;
  unsigned exponent;
};
struct CallNode {
  Function fn;
  Expr arg;
};

struct ExprNode {
  std::variant<ConstantNode, VariableNode, NegateNode, BinaryNode, PowerNode, CallNode> value;
};

Expr operator-(Expr e);
Expr operator+(Expr lhs, Expr rhs);
Expr operator-(Expr lhs, Expr rhs);
Expr operator*(Expr lhs, Expr rhs);
Expr operator/(Expr lhs, Expr rhs);

/// Structural equality (same tree shape, same constants).
bool operator==(const Expr& lhs, const Expr& rhs);

/// Parses the expression grammar
///
///   expr   := term (("+"|"-") term)*
///   term   := factor (("*"|"/") factor)*
///   factor := "-" factor | atom ("^" nat)?
///   atom   := number | ident | func "(" expr ")" | "(" expr ")"
///   number := nat ("/" nat)? | decimal
///   ident  := ("x"|"a"|"y") nat
///
/// A rational literal "p/q" must be written without whitespace; "p / q" is a
/// division. Throws ParseError with the byte offset of the offending token.
Expr parse_expr(std::string_view text);

/// Canonical printer: every compound node is parenthesized, binary operators
/// are surrounded by single spaces, constants are printed in lowest terms.
std::string to_string(const Expr& e);

/// Rewrites negative constants as negations of their magnitude, which is the
/// form the parser produces. parse_expr(to_string(e)) == canonicalize(e).
Expr canonicalize(const Expr& e);

/// Symbolic partial derivative. Zero subterms are pruned as they arise; no
/// other simplification is performed.
Expr derive(const Expr& e, Variable v);

/// Values for the three variable families. Index i of a span binds variable
/// with 1-based index i+1.
template <class T>
struct Bindings {
  std::span<const T> x;
  std::span<const T> a;
  std::span<const T> y;
};

/// Evaluates under the scalar type T (Rational: exact; double: IEEE).
/// Throws EvalError on division by zero, log of a non-positive value, unbound
/// variables, or elementary functions with T = Rational.
template <class T>
T evaluate(const Expr& e, const Bindings<T>& bindings);

extern template Rational evaluate<Rational>(const Expr&, const Bindings<Rational>&);
extern template double evaluate<double>(const Expr&, const Bindings<double>&);

bool uses_functions(const Expr& e);

/// Largest index of `cls` appearing in e, 0 when absent.
std::size_t max_index(const Expr& e, VarClass cls);

}  // namespace tvx
