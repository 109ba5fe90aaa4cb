#pragma once

#include <array>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tdse {

enum class Var { t, x, x1, x2, rho, r };
inline constexpr int kVarCount = 6;

struct VarValues {
  std::array<double, kVarCount> v{};
  double& operator[](Var var) { return v[static_cast<int>(var)]; }
  double operator[](Var var) const { return v[static_cast<int>(var)]; }
};

class ParseError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ExprNode;

/// Immutable closed-form scalar expression with symbolic differentiation.
///
/// Grammar: numbers, + - * / ^, parentheses, sin cos exp sqrt, the variables
/// t, x, x1, x2, rho (or ρ), r, the constant pi, and <v> as sugar for
/// sqrt(1 + v^2). In two dimensions <x> means sqrt(1 + x1^2 + x2^2).
class Expression {
 public:
  Expression();  // constant zero
  static Expression constant(double c);
  static Expression variable(Var v);
  static Expression parse(std::string_view text, int dim = 1);

  double eval(const VarValues& vars) const;
  Expression derivative(Var v) const;
  bool is_zero() const;
  bool depends_on(Var v) const;
  std::string to_string() const;

  friend Expression operator+(const Expression& a, const Expression& b);
  friend Expression operator-(const Expression& a, const Expression& b);
  friend Expression operator*(const Expression& a, const Expression& b);
  friend Expression operator/(const Expression& a, const Expression& b);
  friend Expression operator-(const Expression& a);
  friend Expression pow(const Expression& a, const Expression& b);
  friend Expression sin(const Expression& a);
  friend Expression cos(const Expression& a);
  friend Expression exp(const Expression& a);
  friend Expression sqrt(const Expression& a);

 private:
  explicit Expression(std::shared_ptr<const ExprNode> node)
      : node_(std::move(node)) {}
  std::shared_ptr<const ExprNode> node_;
  friend struct ExprNode;
  friend class ExprBuilder;
};

}  // namespace tdse
