#pragma once

// Scalar fields over a Darboux chart: a small expression language and its
// second-order forward-mode evaluation.
//
// Grammar:
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := atom ('^' integer)?
//   atom   := number | ident | ident '(' expr ')' | '(' expr ')' | '-' atom
//
// Identifiers are coordinates x1..xn, y1..y{kn} or one of the functions
// sin, cos, exp, log, sqrt. A '-' directly in front of a number literal is
// folded into the literal.

#include <memory>
#include <string>
#include <string_view>
#include <variant>

#include "ksym/types.hpp"

namespace ksym {

enum class Func { Sin, Cos, Exp, Log, Sqrt };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

namespace ast {

struct Literal {
  double value;
};
struct Variable {
  int index;  // flat coordinate index
};
struct Negate {
  NodePtr operand;
};
struct Binary {
  char op;  // one of + - * /
  NodePtr lhs;
  NodePtr rhs;
};
struct Power {
  NodePtr base;
  int exponent;
};
struct Call {
  Func func;
  NodePtr arg;
};

NodePtr lit(double value);
NodePtr var(int index);
NodePtr neg(NodePtr operand);
NodePtr bin(char op, NodePtr lhs, NodePtr rhs);
NodePtr pow(NodePtr base, int exponent);
NodePtr call(Func func, NodePtr arg);

}  // namespace ast

struct Node {
  std::variant<ast::Literal, ast::Variable, ast::Negate, ast::Binary,
               ast::Power, ast::Call>
      v;
};

/// Structural equality of expression trees.
bool same_tree(const Node& a, const Node& b);

/// An immutable expression tree bound to a chart. Copies share the tree.
class ScalarField {
 public:
  /// The zero field on `chart`.
  explicit ScalarField(ChartSpec chart);
  ScalarField(ChartSpec chart, NodePtr root);

  static ScalarField constant(ChartSpec chart, double value);

  const Node& root() const { return *root_; }
  const NodePtr& root_ptr() const { return root_; }
  const ChartSpec& chart() const { return chart_; }

  /// True when the tree is the literal 0.
  bool is_zero() const;

  friend bool operator==(const ScalarField& a, const ScalarField& b) {
    return a.chart_ == b.chart_ && same_tree(*a.root_, *b.root_);
  }

 private:
  ChartSpec chart_;
  NodePtr root_;
};

ScalarField parse_scalar_field(std::string_view src, int n, int k);

std::string format_field(const ScalarField& f);
std::string format_node(const Node& node, const ChartSpec& chart);

/// Coordinate name of a flat index ("x1", "y3", ...).
std::string coordinate_name(const ChartSpec& chart, int index);

/// Value, gradient and Hessian of a scalar at a point. eval_jet2 returns an
/// exactly symmetric Hessian.
struct Jet2 {
  double value = 0.0;
  Vec grad;
  Mat hess;

  static Jet2 constant(double value, int dim);
  static Jet2 variable(double value, int index, int dim);

  int dim() const { return static_cast<int>(grad.size()); }
};

Jet2 operator+(const Jet2& a, const Jet2& b);
Jet2 operator-(const Jet2& a, const Jet2& b);
Jet2 operator-(const Jet2& a);
Jet2 operator*(const Jet2& a, const Jet2& b);
Jet2 operator/(const Jet2& a, const Jet2& b);
Jet2 operator*(double s, const Jet2& a);

/// Composes a scalar function with its first and second derivative at a.value.
Jet2 chain(const Jet2& a, double f, double df, double d2f);

Jet2 sin(const Jet2& a);
Jet2 cos(const Jet2& a);
Jet2 exp(const Jet2& a);
Jet2 log(const Jet2& a);
Jet2 sqrt(const Jet2& a);
Jet2 ipow(const Jet2& a, int exponent);

Jet2 eval_jet2(const ScalarField& f, const Vec& p);
double eval_value(const ScalarField& f, const Vec& p);

}  // namespace ksym
