#include "tvx/expr.hpp"

#include <cctype>
#include <cmath>
#include <limits>
#include <optional>

namespace tvx {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

char prefix(VarClass cls) {
  switch (cls) {
    case VarClass::X: return 'x';
    case VarClass::A: return 'a';
    case VarClass::Y: return 'y';
  }
  return '?';
}

std::string to_string(Variable v) { return prefix(v.cls) + std::to_string(v.index); }

// ---------------------------------------------------------------------------
// Construction

Expr::Expr() : Expr(constant(Rational(0))) {}

Expr Expr::constant(Rational value) {
  value.canonicalize();
  return Expr(std::make_shared<const ExprNode>(ExprNode{ConstantNode{std::move(value)}}));
}

Expr Expr::variable(Variable v) {
  return Expr(std::make_shared<const ExprNode>(ExprNode{VariableNode{v}}));
}

Expr Expr::negate(Expr operand) {
  return Expr(std::make_shared<const ExprNode>(ExprNode{NegateNode{std::move(operand)}}));
}

Expr Expr::binary(BinaryOp op, Expr lhs, Expr rhs) {
  return Expr(
      std::make_shared<const ExprNode>(ExprNode{BinaryNode{op, std::move(lhs), std::move(rhs)}}));
}

Expr Expr::power(Expr base, unsigned exponent) {
  return Expr(std::make_shared<const ExprNode>(ExprNode{PowerNode{std::move(base), exponent}}));
}

Expr Expr::call(Function fn, Expr arg) {
  return Expr(std::make_shared<const ExprNode>(ExprNode{CallNode{fn, std::move(arg)}}));
}

Expr operator-(Expr e) { return Expr::negate(std::move(e)); }
Expr operator+(Expr lhs, Expr rhs) { return Expr::binary(BinaryOp::Add, std::move(lhs), std::move(rhs)); }
Expr operator-(Expr lhs, Expr rhs) { return Expr::binary(BinaryOp::Sub, std::move(lhs), std::move(rhs)); }
Expr operator*(Expr lhs, Expr rhs) { return Expr::binary(BinaryOp::Mul, std::move(lhs), std::move(rhs)); }
Expr operator/(Expr lhs, Expr rhs) { return Expr::binary(BinaryOp::Div, std::move(lhs), std::move(rhs)); }

bool operator==(const Expr& lhs, const Expr& rhs) {
  if (&lhs.node() == &rhs.node()) return true;
  const auto& l = lhs.node().value;
  const auto& r = rhs.node().value;
  if (l.index() != r.index()) return false;
  return std::visit(
      overloaded{
          [&](const ConstantNode& n) { return n.value == std::get<ConstantNode>(r).value; },
          [&](const VariableNode& n) { return n.var == std::get<VariableNode>(r).var; },
          [&](const NegateNode& n) { return n.operand == std::get<NegateNode>(r).operand; },
          [&](const BinaryNode& n) {
            const auto& o = std::get<BinaryNode>(r);
            return n.op == o.op && n.lhs == o.lhs && n.rhs == o.rhs;
          },
          [&](const PowerNode& n) {
            const auto& o = std::get<PowerNode>(r);
            return n.exponent == o.exponent && n.base == o.base;
          },
          [&](const CallNode& n) {
            const auto& o = std::get<CallNode>(r);
            return n.fn == o.fn && n.arg == o.arg;
          },
      },
      l);
}

// ---------------------------------------------------------------------------
// Lexer

namespace {

enum class Tok { End, Number, Ident, Func, Plus, Minus, Star, Slash, Caret, LParen, RParen };

struct Token {
  Tok kind = Tok::End;
  std::size_t offset = 0;
  std::string text;
  Rational number;
  bool natural = false;  // plain digit string, usable as an exponent
  Variable var{VarClass::X, 0};
  Function fn = Function::Sin;
};

constexpr unsigned kMaxExponent = 4096;

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  Token next() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    Token t;
    t.offset = pos_;
    if (pos_ >= text_.size()) return t;
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number(t);
    if (std::isalpha(static_cast<unsigned char>(c))) return word(t);
    ++pos_;
    t.text = std::string(1, c);
    switch (c) {
      case '+': t.kind = Tok::Plus; return t;
      case '-': t.kind = Tok::Minus; return t;
      case '*': t.kind = Tok::Star; return t;
      case '/': t.kind = Tok::Slash; return t;
      case '^': t.kind = Tok::Caret; return t;
      case '(': t.kind = Tok::LParen; return t;
      case ')': t.kind = Tok::RParen; return t;
      default:
        throw ParseError(ParseError::Kind::Syntax, t.offset,
                         "syntax error: unexpected character '" + t.text + "'");
    }
  }

 private:
  bool digit_at(std::size_t i) const {
    return i < text_.size() && std::isdigit(static_cast<unsigned char>(text_[i]));
  }

  Token number(Token t) {
    const std::size_t start = pos_;
    while (digit_at(pos_)) ++pos_;
    bool decimal = false;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      decimal = true;
      ++pos_;
      while (digit_at(pos_)) ++pos_;
    }
    // "p/q" with no whitespace is a rational literal.
    bool fraction = false;
    if (!decimal && pos_ + 1 < text_.size() && text_[pos_] == '/' && digit_at(pos_ + 1)) {
      fraction = true;
      ++pos_;
      while (digit_at(pos_)) ++pos_;
      if (pos_ < text_.size() && text_[pos_] == '.') {
        ++pos_;
        while (digit_at(pos_)) ++pos_;
        decimal = true;  // "1/2.5" is malformed
      }
    }
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
      ++pos_;
      decimal = true;  // trailing garbage such as "1.2.3" or "12ab"
    }
    t.text = std::string(text_.substr(start, pos_ - start));
    t.kind = Tok::Number;
    if (fraction && decimal) bad_number(t);
    try {
      t.number = parse_rational(t.text);
    } catch (const ParseError&) {
      bad_number(t);
    }
    t.natural = !fraction && t.text.find('.') == std::string::npos;
    return t;
  }

  [[noreturn]] static void bad_number(const Token& t) {
    throw ParseError(ParseError::Kind::MalformedNumber, t.offset,
                     "malformed number '" + t.text + "'");
  }

  Token word(Token t) {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    t.text = std::string(text_.substr(start, pos_ - start));
    static constexpr std::pair<std::string_view, Function> funcs[] = {
        {"sin", Function::Sin}, {"cos", Function::Cos}, {"exp", Function::Exp}, {"log", Function::Log}};
    for (const auto& [name, fn] : funcs) {
      if (t.text == name) {
        t.kind = Tok::Func;
        t.fn = fn;
        return t;
      }
    }
    const char head = t.text.front();
    const std::string_view tail = std::string_view(t.text).substr(1);
    bool numeric_tail = !tail.empty();
    for (char c : tail) numeric_tail = numeric_tail && std::isdigit(static_cast<unsigned char>(c));
    if ((head == 'x' || head == 'a' || head == 'y') && numeric_tail && tail.size() < 10) {
      const auto index = std::stoul(std::string(tail));
      if (index >= 1) {
        t.kind = Tok::Ident;
        t.var = Variable{head == 'x' ? VarClass::X : head == 'a' ? VarClass::A : VarClass::Y, index};
        return t;
      }
    }
    throw ParseError(ParseError::Kind::UnknownIdentifier, t.offset,
                     "unknown identifier '" + t.text + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Recursive-descent parser

class Parser {
 public:
  explicit Parser(std::string_view text) : lexer_(text) { advance(); }

  Expr parse() {
    Expr e = sum();
    if (cur_.kind != Tok::End) unexpected();
    return e;
  }

 private:
  void advance() { cur_ = lexer_.next(); }

  [[noreturn]] void unexpected() const {
    const std::string what = cur_.kind == Tok::End ? "end of input" : "'" + cur_.text + "'";
    throw ParseError(ParseError::Kind::Syntax, cur_.offset, "syntax error: unexpected " + what);
  }

  void expect(Tok kind) {
    if (cur_.kind != kind) unexpected();
    advance();
  }

  Expr sum() {
    Expr lhs = term();
    while (cur_.kind == Tok::Plus || cur_.kind == Tok::Minus) {
      const auto op = cur_.kind == Tok::Plus ? BinaryOp::Add : BinaryOp::Sub;
      advance();
      lhs = Expr::binary(op, std::move(lhs), term());
    }
    return lhs;
  }

  Expr term() {
    Expr lhs = factor();
    while (cur_.kind == Tok::Star || cur_.kind == Tok::Slash) {
      const auto op = cur_.kind == Tok::Star ? BinaryOp::Mul : BinaryOp::Div;
      advance();
      lhs = Expr::binary(op, std::move(lhs), factor());
    }
    return lhs;
  }

  Expr factor() {
    if (cur_.kind == Tok::Minus) {
      advance();
      return Expr::negate(factor());
    }
    Expr base = atom();
    if (cur_.kind != Tok::Caret) return base;
    advance();
    if (cur_.kind != Tok::Number || !cur_.natural) unexpected();
    if (cur_.number > kMaxExponent) {
      throw ParseError(ParseError::Kind::MalformedNumber, cur_.offset,
                       "exponent '" + cur_.text + "' too large");
    }
    const auto exponent = static_cast<unsigned>(cur_.number.get_num().get_ui());
    advance();
    return Expr::power(std::move(base), exponent);
  }

  Expr atom() {
    switch (cur_.kind) {
      case Tok::Number: {
        Expr e = Expr::constant(cur_.number);
        advance();
        return e;
      }
      case Tok::Ident: {
        Expr e = Expr::variable(cur_.var);
        advance();
        return e;
      }
      case Tok::Func: {
        const Function fn = cur_.fn;
        advance();
        expect(Tok::LParen);
        Expr arg = sum();
        expect(Tok::RParen);
        return Expr::call(fn, std::move(arg));
      }
      case Tok::LParen: {
        advance();
        Expr e = sum();
        expect(Tok::RParen);
        return e;
      }
      default:
        unexpected();
    }
  }

  Lexer lexer_;
  Token cur_;
};

const char* name(Function fn) {
  switch (fn) {
    case Function::Sin: return "sin";
    case Function::Cos: return "cos";
    case Function::Exp: return "exp";
    case Function::Log: return "log";
  }
  return "?";
}

char symbol(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return '+';
    case BinaryOp::Sub: return '-';
    case BinaryOp::Mul: return '*';
    case BinaryOp::Div: return '/';
  }
  return '?';
}

void print(const Expr& e, std::string& out) {
  std::visit(overloaded{
                 [&](const ConstantNode& n) {
                   if (sgn(n.value) < 0) {
                     out += "(-" + to_string(Rational(-n.value)) + ")";
                   } else {
                     out += to_string(n.value);
                   }
                 },
                 [&](const VariableNode& n) { out += to_string(n.var); },
                 [&](const NegateNode& n) {
                   out += "(-";
                   print(n.operand, out);
                   out += ')';
                 },
                 [&](const BinaryNode& n) {
                   out += '(';
                   print(n.lhs, out);
                   out += ' ';
                   out += symbol(n.op);
                   out += ' ';
                   print(n.rhs, out);
                   out += ')';
                 },
                 [&](const PowerNode& n) {
                   out += '(';
                   print(n.base, out);
                   out += '^';
                   out += std::to_string(n.exponent);
                   out += ')';
                 },
                 [&](const CallNode& n) {
                   out += name(n.fn);
                   out += '(';
                   print(n.arg, out);
                   out += ')';
                 },
             },
             e.node().value);
}

}  // namespace

Expr parse_expr(std::string_view text) {
  if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) {
    throw ParseError(ParseError::Kind::Syntax, text.size(), "syntax error: empty expression");
  }
  return Parser(text).parse();
}

std::string to_string(const Expr& e) {
  std::string out;
  print(e, out);
  return out;
}

Expr canonicalize(const Expr& e) {
  return std::visit(
      overloaded{
          [&](const ConstantNode& n) {
            return sgn(n.value) < 0 ? Expr::negate(Expr::constant(-n.value)) : e;
          },
          [&](const VariableNode&) { return e; },
          [&](const NegateNode& n) { return Expr::negate(canonicalize(n.operand)); },
          [&](const BinaryNode& n) {
            return Expr::binary(n.op, canonicalize(n.lhs), canonicalize(n.rhs));
          },
          [&](const PowerNode& n) { return Expr::power(canonicalize(n.base), n.exponent); },
          [&](const CallNode& n) { return Expr::call(n.fn, canonicalize(n.arg)); },
      },
      e.node().value);
}

// ---------------------------------------------------------------------------
// Differentiation

namespace {

bool is_constant(const Expr& e, long value) {
  const auto* c = std::get_if<ConstantNode>(&e.node().value);
  return c != nullptr && c->value == value;
}

Expr zero() { return Expr::constant(Rational(0)); }
Expr one() { return Expr::constant(Rational(1)); }

Expr add(Expr l, Expr r) {
  if (is_constant(l, 0)) return r;
  if (is_constant(r, 0)) return l;
  return std::move(l) + std::move(r);
}

Expr sub(Expr l, Expr r) {
  if (is_constant(r, 0)) return l;
  if (is_constant(l, 0)) return -std::move(r);
  return std::move(l) - std::move(r);
}

Expr mul(Expr l, Expr r) {
  if (is_constant(l, 0) || is_constant(r, 0)) return zero();
  if (is_constant(l, 1)) return r;
  if (is_constant(r, 1)) return l;
  return std::move(l) * std::move(r);
}

}  // namespace

Expr derive(const Expr& e, Variable v) {
  return std::visit(
      overloaded{
          [&](const ConstantNode&) { return zero(); },
          [&](const VariableNode& n) { return n.var == v ? one() : zero(); },
          [&](const NegateNode& n) {
            Expr d = derive(n.operand, v);
            return is_constant(d, 0) ? d : -d;
          },
          [&](const BinaryNode& n) {
            Expr dl = derive(n.lhs, v);
            Expr dr = derive(n.rhs, v);
            switch (n.op) {
              case BinaryOp::Add: return add(dl, dr);
              case BinaryOp::Sub: return sub(dl, dr);
              case BinaryOp::Mul: return add(mul(dl, n.rhs), mul(n.lhs, dr));
              case BinaryOp::Div: {
                Expr numerator = sub(mul(dl, n.rhs), mul(n.lhs, dr));
                if (is_constant(numerator, 0)) return numerator;
                return numerator / Expr::power(n.rhs, 2);
              }
            }
            return zero();
          },
          [&](const PowerNode& n) {
            if (n.exponent == 0) return zero();
            Expr db = derive(n.base, v);
            if (n.exponent == 1) return db;
            Expr outer = Expr::constant(Rational(n.exponent));
            Expr reduced = n.exponent == 2 ? n.base : Expr::power(n.base, n.exponent - 1);
            return mul(mul(outer, reduced), db);
          },
          [&](const CallNode& n) {
            Expr da = derive(n.arg, v);
            if (is_constant(da, 0)) return da;
            switch (n.fn) {
              case Function::Sin: return mul(Expr::call(Function::Cos, n.arg), da);
              case Function::Cos: return -mul(Expr::call(Function::Sin, n.arg), da);
              case Function::Exp: return mul(e, da);
              case Function::Log: return da / n.arg;
            }
            return zero();
          },
      },
      e.node().value);
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

template <class T>
T lookup(const Bindings<T>& b, Variable v) {
  const std::span<const T> values = v.cls == VarClass::X ? b.x : v.cls == VarClass::A ? b.a : b.y;
  if (v.index == 0 || v.index > values.size()) {
    throw EvalError("variable " + to_string(v) + " is not assigned");
  }
  return values[v.index - 1];
}

Rational int_pow(const Rational& base, unsigned k) {
  mpz_class num, den;
  mpz_pow_ui(num.get_mpz_t(), base.get_num_mpz_t(), k);
  mpz_pow_ui(den.get_mpz_t(), base.get_den_mpz_t(), k);
  return Rational(num, den);  // already in lowest terms
}

double int_pow(double base, unsigned k) {
  double result = 1.0;
  double factor = base;
  while (k != 0) {
    if (k & 1U) result *= factor;
    factor *= factor;
    k >>= 1U;
  }
  return result;
}

Rational apply(Function, const Rational&) {
  throw EvalError("elementary functions require the float backend");
}

double apply(Function fn, double value) {
  switch (fn) {
    case Function::Sin: return std::sin(value);
    case Function::Cos: return std::cos(value);
    case Function::Exp: return std::exp(value);
    case Function::Log:
      if (!(value > 0.0)) throw EvalError("log of non-positive value");
      return std::log(value);
  }
  return 0.0;
}

Rational convert(const Rational& r, const Rational*) { return r; }
double convert(const Rational& r, const double*) { return to_double(r); }

bool is_zero(const Rational& r) { return sgn(r) == 0; }
bool is_zero(double d) { return d == 0.0; }

}  // namespace

template <class T>
T evaluate(const Expr& e, const Bindings<T>& b) {
  return std::visit(overloaded{
                        [&](const ConstantNode& n) -> T {
                          return convert(n.value, static_cast<const T*>(nullptr));
                        },
                        [&](const VariableNode& n) -> T { return lookup(b, n.var); },
                        [&](const NegateNode& n) -> T { return T(-evaluate(n.operand, b)); },
                        [&](const BinaryNode& n) -> T {
                          T l = evaluate(n.lhs, b);
                          T r = evaluate(n.rhs, b);
                          switch (n.op) {
                            case BinaryOp::Add: return T(l + r);
                            case BinaryOp::Sub: return T(l - r);
                            case BinaryOp::Mul: return T(l * r);
                            case BinaryOp::Div:
                              if (is_zero(r)) throw EvalError("division by zero");
                              return T(l / r);
                          }
                          return T(0);
                        },
                        [&](const PowerNode& n) -> T {
                          return int_pow(evaluate(n.base, b), n.exponent);
                        },
                        [&](const CallNode& n) -> T { return apply(n.fn, evaluate(n.arg, b)); },
                    },
                    e.node().value);
}

template Rational evaluate<Rational>(const Expr&, const Bindings<Rational>&);
template double evaluate<double>(const Expr&, const Bindings<double>&);

bool uses_functions(const Expr& e) {
  return std::visit(overloaded{
                        [](const ConstantNode&) { return false; },
                        [](const VariableNode&) { return false; },
                        [](const NegateNode& n) { return uses_functions(n.operand); },
                        [](const BinaryNode& n) { return uses_functions(n.lhs) || uses_functions(n.rhs); },
                        [](const PowerNode& n) { return uses_functions(n.base); },
                        [](const CallNode&) { return true; },
                    },
                    e.node().value);
}

std::size_t max_index(const Expr& e, VarClass cls) {
  return std::visit(
      overloaded{
          [](const ConstantNode&) -> std::size_t { return 0; },
          [&](const VariableNode& n) -> std::size_t { return n.var.cls == cls ? n.var.index : 0; },
          [&](const NegateNode& n) { return max_index(n.operand, cls); },
          [&](const BinaryNode& n) { return std::max(max_index(n.lhs, cls), max_index(n.rhs, cls)); },
          [&](const PowerNode& n) { return max_index(n.base, cls); },
          [&](const CallNode& n) { return max_index(n.arg, cls); },
      },
      e.node().value);
}

}  // namespace tvx
