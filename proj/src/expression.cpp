#include "tdse/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <sstream>

namespace tdse {

enum class Op { constant, variable, add, sub, mul, div, pow, neg, sin, cos, exp, sqrt, log };

struct ExprNode {
  Op op = Op::constant;
  double value = 0.0;
  Var var = Var::t;
  std::shared_ptr<const ExprNode> a, b;
};

class ExprBuilder {
 public:
  static Expression make(Op op, const Expression& a, const Expression& b = {}) {
    auto n = std::make_shared<ExprNode>();
    n->op = op;
    n->a = a.node_;
    n->b = b.node_;
    return Expression(n);
  }
  static const ExprNode& node(const Expression& e) { return *e.node_; }
};

namespace {

bool is_const(const Expression& e, double* out = nullptr) {
  const ExprNode& n = ExprBuilder::node(e);
  if (n.op != Op::constant) return false;
  if (out) *out = n.value;
  return true;
}

bool is_const_value(const Expression& e, double v) {
  double c;
  return is_const(e, &c) && c == v;
}

const char* var_name(Var v) {
  switch (v) {
    case Var::t: return "t";
    case Var::x: return "x";
    case Var::x1: return "x1";
    case Var::x2: return "x2";
    case Var::rho: return "rho";
    case Var::r: return "r";
  }
  return "?";
}

}  // namespace

Expression::Expression() : Expression(constant(0.0)) {}

Expression Expression::constant(double c) {
  auto n = std::make_shared<ExprNode>();
  n->op = Op::constant;
  n->value = c;
  return Expression(n);
}

Expression Expression::variable(Var v) {
  auto n = std::make_shared<ExprNode>();
  n->op = Op::variable;
  n->var = v;
  return Expression(n);
}

Expression operator+(const Expression& a, const Expression& b) {
  double x, y;
  if (is_const(a, &x) && is_const(b, &y)) return Expression::constant(x + y);
  if (is_const_value(a, 0.0)) return b;
  if (is_const_value(b, 0.0)) return a;
  return ExprBuilder::make(Op::add, a, b);
}

Expression operator-(const Expression& a, const Expression& b) {
  double x, y;
  if (is_const(a, &x) && is_const(b, &y)) return Expression::constant(x - y);
  if (is_const_value(b, 0.0)) return a;
  if (is_const_value(a, 0.0)) return -b;
  return ExprBuilder::make(Op::sub, a, b);
}

Expression operator*(const Expression& a, const Expression& b) {
  double x, y;
  if (is_const(a, &x) && is_const(b, &y)) return Expression::constant(x * y);
  if (is_const_value(a, 0.0) || is_const_value(b, 0.0))
    return Expression::constant(0.0);
  if (is_const_value(a, 1.0)) return b;
  if (is_const_value(b, 1.0)) return a;
  return ExprBuilder::make(Op::mul, a, b);
}

Expression operator/(const Expression& a, const Expression& b) {
  double x, y;
  if (is_const(a, &x) && is_const(b, &y) && y != 0.0)
    return Expression::constant(x / y);
  if (is_const_value(a, 0.0)) return Expression::constant(0.0);
  if (is_const_value(b, 1.0)) return a;
  return ExprBuilder::make(Op::div, a, b);
}

Expression operator-(const Expression& a) {
  double x;
  if (is_const(a, &x)) return Expression::constant(-x);
  return ExprBuilder::make(Op::neg, a);
}

Expression pow(const Expression& a, const Expression& b) {
  double x, y;
  if (is_const(a, &x) && is_const(b, &y)) return Expression::constant(std::pow(x, y));
  if (is_const_value(b, 0.0)) return Expression::constant(1.0);
  if (is_const_value(b, 1.0)) return a;
  return ExprBuilder::make(Op::pow, a, b);
}

#define TDSE_UNARY(fn, opname)                                       \
  Expression fn(const Expression& a) {                               \
    double x;                                                        \
    if (is_const(a, &x)) return Expression::constant(std::fn(x));    \
    return ExprBuilder::make(Op::opname, a);                         \
  }
TDSE_UNARY(sin, sin)
TDSE_UNARY(cos, cos)
TDSE_UNARY(exp, exp)
TDSE_UNARY(sqrt, sqrt)
#undef TDSE_UNARY

namespace {

Expression log_expr(const Expression& a) {
  double x;
  if (is_const(a, &x)) return Expression::constant(std::log(x));
  return ExprBuilder::make(Op::log, a);
}


double eval_node(const ExprNode& n, const VarValues& vars) {
  switch (n.op) {
    case Op::constant: return n.value;
    case Op::variable: return vars[n.var];
    case Op::add: return eval_node(*n.a, vars) + eval_node(*n.b, vars);
    case Op::sub: return eval_node(*n.a, vars) - eval_node(*n.b, vars);
    case Op::mul: return eval_node(*n.a, vars) * eval_node(*n.b, vars);
    case Op::div: return eval_node(*n.a, vars) / eval_node(*n.b, vars);
    case Op::pow: {
      const double base = eval_node(*n.a, vars);
      if (n.b->op == Op::constant) {
        const double e = n.b->value;
        if (e == 2.0) return base * base;
        if (e == 3.0) return base * base * base;
        if (e == 4.0) {
          const double s = base * base;
          return s * s;
        }
        return std::pow(base, e);
      }
      return std::pow(base, eval_node(*n.b, vars));
    }
    case Op::neg: return -eval_node(*n.a, vars);
    case Op::sin: return std::sin(eval_node(*n.a, vars));
    case Op::cos: return std::cos(eval_node(*n.a, vars));
    case Op::exp: return std::exp(eval_node(*n.a, vars));
    case Op::sqrt: return std::sqrt(eval_node(*n.a, vars));
    case Op::log: return std::log(eval_node(*n.a, vars));
  }
  return 0.0;
}

}  // namespace

double Expression::eval(const VarValues& vars) const {
  return eval_node(*node_, vars);
}

Expression Expression::derivative(Var v) const {
  const ExprNode& n = *node_;
  auto A = [&] { return Expression(n.a); };
  auto B = [&] { return Expression(n.b); };
  switch (n.op) {
    case Op::constant: return constant(0.0);
    case Op::variable: return constant(n.var == v ? 1.0 : 0.0);
    case Op::add: return A().derivative(v) + B().derivative(v);
    case Op::sub: return A().derivative(v) - B().derivative(v);
    case Op::mul:
      return A().derivative(v) * B() + A() * B().derivative(v);
    case Op::div:
      return (A().derivative(v) * B() - A() * B().derivative(v)) /
             pow(B(), constant(2.0));
    case Op::pow: {
      double e;
      if (is_const(B(), &e))
        return constant(e) * pow(A(), constant(e - 1.0)) * A().derivative(v);
      return pow(A(), B()) * (B().derivative(v) * log_expr(A()) +
                              B() * A().derivative(v) / A());
    }
    case Op::neg: return -A().derivative(v);
    case Op::sin: return cos(A()) * A().derivative(v);
    case Op::cos: return -(sin(A()) * A().derivative(v));
    case Op::exp: return exp(A()) * A().derivative(v);
    case Op::sqrt: return A().derivative(v) / (constant(2.0) * sqrt(A()));
    case Op::log: return A().derivative(v) / A();
  }
  return constant(0.0);
}

bool Expression::is_zero() const { return is_const_value(*this, 0.0); }

bool Expression::depends_on(Var v) const { return !derivative(v).is_zero(); }

namespace {

void print(const ExprNode& n, std::ostringstream& os) {
  auto bin = [&](const char* sym) {
    os << '(';
    print(*n.a, os);
    os << sym;
    print(*n.b, os);
    os << ')';
  };
  auto fn = [&](const char* name) {
    os << name << '(';
    print(*n.a, os);
    os << ')';
  };
  switch (n.op) {
    case Op::constant: os << n.value; break;
    case Op::variable: os << var_name(n.var); break;
    case Op::add: bin(" + "); break;
    case Op::sub: bin(" - "); break;
    case Op::mul: bin("*"); break;
    case Op::div: bin("/"); break;
    case Op::pow: bin("^"); break;
    case Op::neg: os << "(-"; print(*n.a, os); os << ')'; break;
    case Op::sin: fn("sin"); break;
    case Op::cos: fn("cos"); break;
    case Op::exp: fn("exp"); break;
    case Op::sqrt: fn("sqrt"); break;
    case Op::log: fn("log"); break;
  }
}

class Parser {
 public:
  Parser(std::string_view text, int dim) : s_(text), dim_(dim) {}

  Expression parse() {
    Expression e = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("expression \"" + std::string(s_) + "\" at " +
                     std::to_string(pos_) + ": " + msg);
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
      ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  Expression expr() {
    Expression e = term();
    for (;;) {
      if (accept('+')) e = e + term();
      else if (accept('-')) e = e - term();
      else return e;
    }
  }
  Expression term() {
    Expression e = unary();
    for (;;) {
      if (accept('*')) e = e * unary();
      else if (accept('/')) e = e / unary();
      else return e;
    }
  }
  Expression unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }
  Expression power() {
    Expression base = primary();
    if (accept('^')) return pow(base, unary());
    return base;
  }
  std::string identifier() {
    skip();
    // "ρ" is two bytes in UTF-8
    if (s_.substr(pos_, 2) == "\xCF\x81") {
      pos_ += 2;
      return "rho";
    }
    const std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    return std::string(s_.substr(start, pos_ - start));
  }
  Expression variable(const std::string& name) {
    if (name == "t") return Expression::variable(Var::t);
    if (name == "rho") return Expression::variable(Var::rho);
    if (name == "r") return Expression::variable(Var::r);
    if (name == "pi") return Expression::constant(3.14159265358979323846);
    if (dim_ == 1 && name == "x") return Expression::variable(Var::x);
    if (name == "x1") return Expression::variable(Var::x1);
    if (name == "x2") return Expression::variable(Var::x2);
    fail("unknown identifier '" + name + "'");
  }
  Expression bracket(const std::string& name) {
    const Expression one = Expression::constant(1.0);
    const Expression two = Expression::constant(2.0);
    if (name == "x" && dim_ == 2)
      return sqrt(one + pow(Expression::variable(Var::x1), two) +
                  pow(Expression::variable(Var::x2), two));
    return sqrt(one + pow(variable(name), two));
  }
  Expression primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end");
    const char c = s_[pos_];
    if (accept('(')) {
      Expression e = expr();
      expect(')');
      return e;
    }
    if (accept('<')) {
      const std::string name = identifier();
      expect('>');
      return bracket(name);
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.data() + pos_;
      char* end = nullptr;
      const std::string copy(s_.substr(pos_));
      const double v = std::strtod(copy.c_str(), &end);
      pos_ += static_cast<std::size_t>(end - copy.c_str());
      (void)begin;
      return Expression::constant(v);
    }
    const std::string name = identifier();
    if (name.empty()) fail("expected a term");
    skip();
    if (pos_ < s_.size() && s_[pos_] == '(') {
      ++pos_;
      Expression arg = expr();
      expect(')');
      if (name == "sin") return sin(arg);
      if (name == "cos") return cos(arg);
      if (name == "exp") return exp(arg);
      if (name == "sqrt") return sqrt(arg);
      fail("unknown function '" + name + "'");
    }
    return variable(name);
  }

  std::string_view s_;
  int dim_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression Expression::parse(std::string_view text, int dim) {
  return Parser(text, dim).parse();
}

std::string Expression::to_string() const {
  std::ostringstream os;
  os.precision(17);
  print(*node_, os);
  return os.str();
}

}  // namespace tdse
