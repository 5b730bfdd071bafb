#include "ksym/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>
#include <system_error>
#include <vector>

#include "ksym/errors.hpp"

namespace ksym {

namespace ast {

NodePtr lit(double value) {
  return std::make_shared<const Node>(Node{Literal{value}});
}
NodePtr var(int index) {
  return std::make_shared<const Node>(Node{Variable{index}});
}
NodePtr neg(NodePtr operand) {
  return std::make_shared<const Node>(Node{Negate{std::move(operand)}});
}
NodePtr bin(char op, NodePtr lhs, NodePtr rhs) {
  return std::make_shared<const Node>(
      Node{Binary{op, std::move(lhs), std::move(rhs)}});
}
NodePtr pow(NodePtr base, int exponent) {
  return std::make_shared<const Node>(Node{Power{std::move(base), exponent}});
}
NodePtr call(Func func, NodePtr arg) {
  return std::make_shared<const Node>(Node{Call{func, std::move(arg)}});
}

}  // namespace ast

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

const char* func_name(Func f) {
  switch (f) {
    case Func::Sin: return "sin";
    case Func::Cos: return "cos";
    case Func::Exp: return "exp";
    case Func::Log: return "log";
    case Func::Sqrt: return "sqrt";
  }
  return "?";
}

std::optional<Func> func_from_name(std::string_view name) {
  if (name == "sin") return Func::Sin;
  if (name == "cos") return Func::Cos;
  if (name == "exp") return Func::Exp;
  if (name == "log") return Func::Log;
  if (name == "sqrt") return Func::Sqrt;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Lexer

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
  Tok kind;
  std::string_view text;
  std::size_t pos;
  double number = 0.0;
};

std::string describe(const Token& t) {
  if (t.kind == Tok::End) return "end of input";
  return "'" + std::string(t.text) + "'";
}

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < src.size()) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && i + 1 < src.size() &&
         std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
      if (i < src.size() && src[i] == '.') {
        ++i;
        while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
      }
      if (i < src.size() && (src[i] == 'e' || src[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < src.size() && (src[j] == '+' || src[j] == '-')) ++j;
        if (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) {
          i = j;
          while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
        }
      }
      Token t{Tok::Number, src.substr(start, i - start), start};
      auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.number);
      if (ec != std::errc() || !std::isfinite(t.number)) {
        throw SyntaxError(start, {"finite number"}, "'" + std::string(t.text) + "'");
      }
      out.push_back(t);
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (i < src.size() && (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_')) ++i;
      out.push_back(Token{Tok::Ident, src.substr(start, i - start), start});
      continue;
    }
    Tok kind;
    switch (c) {
      case '+': kind = Tok::Plus; break;
      case '-': kind = Tok::Minus; break;
      case '*': kind = Tok::Star; break;
      case '/': kind = Tok::Slash; break;
      case '^': kind = Tok::Caret; break;
      case '(': kind = Tok::LParen; break;
      case ')': kind = Tok::RParen; break;
      default:
        throw SyntaxError(start, {"number", "identifier", "operator", "'('", "')'"},
                          "'" + std::string(1, c) + "'");
    }
    out.push_back(Token{kind, src.substr(start, 1), start});
    ++i;
  }
  out.push_back(Token{Tok::End, {}, src.size()});
  return out;
}

// ---------------------------------------------------------------------------
// Recursive descent parser

class Parser {
 public:
  Parser(std::vector<Token> tokens, ChartSpec chart)
      : toks_(std::move(tokens)), chart_(chart) {}

  NodePtr parse() {
    NodePtr e = expr();
    if (peek().kind != Tok::End) {
      throw SyntaxError(peek().pos, {"operator", "end of input"}, describe(peek()));
    }
    return e;
  }

 private:
  const Token& peek() const { return toks_[cur_]; }
  const Token& next() { return toks_[cur_++]; }

  NodePtr expr() {
    NodePtr lhs = term();
    while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
      const char op = next().kind == Tok::Plus ? '+' : '-';
      lhs = ast::bin(op, lhs, term());
    }
    return lhs;
  }

  NodePtr term() {
    NodePtr lhs = factor();
    while (peek().kind == Tok::Star || peek().kind == Tok::Slash) {
      const char op = next().kind == Tok::Star ? '*' : '/';
      lhs = ast::bin(op, lhs, factor());
    }
    return lhs;
  }

  NodePtr factor() {
    NodePtr base = atom();
    if (peek().kind != Tok::Caret) return base;
    next();
    bool negative = false;
    std::size_t pos = peek().pos;
    if (peek().kind == Tok::Minus) {
      negative = true;
      next();
    }
    const Token& t = peek();
    if (t.kind != Tok::Number) {
      if (t.kind == Tok::End) throw SyntaxError(t.pos, {"integer exponent"}, describe(t));
      throw BadExponent(std::string(t.text), pos);
    }
    for (char c : t.text) {
      if (!std::isdigit(static_cast<unsigned char>(c))) throw BadExponent(std::string(t.text), pos);
    }
    int value = 0;
    auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), value);
    if (ec != std::errc()) throw BadExponent(std::string(t.text), pos);
    next();
    return ast::pow(base, negative ? -value : value);
  }

  NodePtr atom() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Number:
        next();
        return ast::lit(t.number);
      case Tok::Minus: {
        next();
        if (peek().kind == Tok::Number) return ast::lit(-next().number);
        return ast::neg(atom());
      }
      case Tok::LParen: {
        next();
        NodePtr e = expr();
        if (peek().kind != Tok::RParen) {
          throw SyntaxError(peek().pos, {"')'"}, describe(peek()));
        }
        next();
        return e;
      }
      case Tok::Ident:
        return identifier();
      default:
        throw SyntaxError(t.pos, {"number", "identifier", "'('", "'-'"}, describe(t));
    }
  }

  NodePtr identifier() {
    const Token& t = next();
    if (auto f = func_from_name(t.text)) {
      if (peek().kind != Tok::LParen) {
        throw SyntaxError(peek().pos, {"'('"}, describe(peek()));
      }
      next();
      NodePtr arg = expr();
      if (peek().kind != Tok::RParen) {
        throw SyntaxError(peek().pos, {"')'"}, describe(peek()));
      }
      next();
      return ast::call(*f, arg);
    }
    if (auto idx = coordinate_index(t.text)) return ast::var(*idx);
    throw UnknownIdentifier(std::string(t.text), t.pos);
  }

  std::optional<int> coordinate_index(std::string_view name) const {
    if (name.size() < 2 || (name[0] != 'x' && name[0] != 'y')) return std::nullopt;
    if (name[1] == '0') return std::nullopt;
    int i = 0;
    auto [ptr, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), i);
    if (ec != std::errc() || ptr != name.data() + name.size()) return std::nullopt;
    if (name[0] == 'x') {
      if (i < 1 || i > chart_.n) return std::nullopt;
      return i - 1;
    }
    if (i < 1 || i > chart_.n * chart_.k) return std::nullopt;
    return chart_.n + i - 1;
  }

  std::vector<Token> toks_;
  std::size_t cur_ = 0;
  ChartSpec chart_;
};

// ---------------------------------------------------------------------------
// Formatting

constexpr int kPrecAtom = 4;

int precedence(const Node& node) {
  return std::visit(overloaded{
                        [](const ast::Binary& b) { return (b.op == '+' || b.op == '-') ? 1 : 2; },
                        [](const ast::Power&) { return 3; },
                        [](const auto&) { return kPrecAtom; },
                    },
                    node.v);
}

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void emit(const Node& node, const ChartSpec& chart, int min_prec, std::string& out);

void emit_atom(const Node& node, const ChartSpec& chart, std::string& out) {
  // Literals are always parenthesized here.
  const bool is_lit = std::holds_alternative<ast::Literal>(node.v);
  if (is_lit || precedence(node) < kPrecAtom) {
    out += '(';
    emit(node, chart, 0, out);
    out += ')';
  } else {
    emit(node, chart, kPrecAtom, out);
  }
}

void emit(const Node& node, const ChartSpec& chart, int min_prec, std::string& out) {
  if (precedence(node) < min_prec) {
    out += '(';
    emit(node, chart, 0, out);
    out += ')';
    return;
  }
  std::visit(overloaded{
                 [&](const ast::Literal& l) { out += format_number(l.value); },
                 [&](const ast::Variable& v) { out += coordinate_name(chart, v.index); },
                 [&](const ast::Negate& n) {
                   out += '-';
                   emit_atom(*n.operand, chart, out);
                 },
                 [&](const ast::Binary& b) {
                   const int p = (b.op == '+' || b.op == '-') ? 1 : 2;
                   emit(*b.lhs, chart, p, out);
                   out += b.op;
                   emit(*b.rhs, chart, p + 1, out);
                 },
                 [&](const ast::Power& p) {
                   emit(*p.base, chart, kPrecAtom, out);
                   out += '^';
                   out += std::to_string(p.exponent);
                 },
                 [&](const ast::Call& c) {
                   out += func_name(c.func);
                   out += '(';
                   emit(*c.arg, chart, 0, out);
                   out += ')';
                 },
             },
             node.v);
}

// ---------------------------------------------------------------------------
// Evaluation

class JetEvaluator {
 public:
  JetEvaluator(const Vec& p, const ChartSpec& chart) : p_(p), chart_(chart), dim_(static_cast<int>(p.size())) {}

  Jet2 operator()(const Node& node) const {
    return std::visit(overloaded{
                          [&](const ast::Literal& l) { return Jet2::constant(l.value, dim_); },
                          [&](const ast::Variable& v) { return Jet2::variable(p_[v.index], v.index, dim_); },
                          [&](const ast::Negate& n) { return -(*this)(*n.operand); },
                          [&](const ast::Binary& b) { return binary(node, b); },
                          [&](const ast::Power& pw) {
                            Jet2 base = (*this)(*pw.base);
                            if (pw.exponent < 0 && base.value == 0.0) {
                              throw EvalError("negative power of zero", format_node(node, chart_));
                            }
                            return ipow(base, pw.exponent);
                          },
                          [&](const ast::Call& c) { return apply(node, c); },
                      },
                      node.v);
  }

 private:
  Jet2 binary(const Node& node, const ast::Binary& b) const {
    Jet2 lhs = (*this)(*b.lhs);
    Jet2 rhs = (*this)(*b.rhs);
    switch (b.op) {
      case '+': return lhs + rhs;
      case '-': return lhs - rhs;
      case '*': return lhs * rhs;
      default:
        if (rhs.value == 0.0) throw EvalError("division by zero", format_node(node, chart_));
        return lhs / rhs;
    }
  }

  Jet2 apply(const Node& node, const ast::Call& c) const {
    Jet2 a = (*this)(*c.arg);
    switch (c.func) {
      case Func::Sin: return sin(a);
      case Func::Cos: return cos(a);
      case Func::Exp: return exp(a);
      case Func::Log:
        if (a.value <= 0.0) throw EvalError("log of nonpositive argument", format_node(node, chart_));
        return log(a);
      case Func::Sqrt:
        if (a.value <= 0.0) throw EvalError("sqrt of nonpositive argument", format_node(node, chart_));
        return sqrt(a);
    }
    return a;
  }

  const Vec& p_;
  const ChartSpec& chart_;
  int dim_;
};

double eval_node(const Node& node, const Vec& p, const ChartSpec& chart) {
  return std::visit(
      overloaded{
          [&](const ast::Literal& l) { return l.value; },
          [&](const ast::Variable& v) { return p[v.index]; },
          [&](const ast::Negate& n) { return -eval_node(*n.operand, p, chart); },
          [&](const ast::Binary& b) {
            const double l = eval_node(*b.lhs, p, chart);
            const double r = eval_node(*b.rhs, p, chart);
            switch (b.op) {
              case '+': return l + r;
              case '-': return l - r;
              case '*': return l * r;
              default:
                if (r == 0.0) throw EvalError("division by zero", format_node(node, chart));
                return l / r;
            }
          },
          [&](const ast::Power& pw) {
            const double base = eval_node(*pw.base, p, chart);
            if (pw.exponent < 0 && base == 0.0) {
              throw EvalError("negative power of zero", format_node(node, chart));
            }
            return std::pow(base, pw.exponent);
          },
          [&](const ast::Call& c) {
            const double a = eval_node(*c.arg, p, chart);
            switch (c.func) {
              case Func::Sin: return std::sin(a);
              case Func::Cos: return std::cos(a);
              case Func::Exp: return std::exp(a);
              case Func::Log:
                if (a <= 0.0) throw EvalError("log of nonpositive argument", format_node(node, chart));
                return std::log(a);
              case Func::Sqrt:
                if (a <= 0.0) throw EvalError("sqrt of nonpositive argument", format_node(node, chart));
                return std::sqrt(a);
            }
            return a;
          },
      },
      node.v);
}

}  // namespace

bool same_tree(const Node& a, const Node& b) {
  if (a.v.index() != b.v.index()) return false;
  return std::visit(
      overloaded{
          [&](const ast::Literal& l) { return l.value == std::get<ast::Literal>(b.v).value; },
          [&](const ast::Variable& v) { return v.index == std::get<ast::Variable>(b.v).index; },
          [&](const ast::Negate& n) { return same_tree(*n.operand, *std::get<ast::Negate>(b.v).operand); },
          [&](const ast::Binary& x) {
            const auto& y = std::get<ast::Binary>(b.v);
            return x.op == y.op && same_tree(*x.lhs, *y.lhs) && same_tree(*x.rhs, *y.rhs);
          },
          [&](const ast::Power& x) {
            const auto& y = std::get<ast::Power>(b.v);
            return x.exponent == y.exponent && same_tree(*x.base, *y.base);
          },
          [&](const ast::Call& x) {
            const auto& y = std::get<ast::Call>(b.v);
            return x.func == y.func && same_tree(*x.arg, *y.arg);
          },
      },
      a.v);
}

ScalarField::ScalarField(ChartSpec chart) : chart_(chart), root_(ast::lit(0.0)) {}

ScalarField::ScalarField(ChartSpec chart, NodePtr root)
    : chart_(chart), root_(std::move(root)) {}

ScalarField ScalarField::constant(ChartSpec chart, double value) {
  return ScalarField(chart, ast::lit(value));
}

bool ScalarField::is_zero() const {
  const auto* l = std::get_if<ast::Literal>(&root_->v);
  return l && l->value == 0.0;
}

ScalarField parse_scalar_field(std::string_view src, int n, int k) {
  if (n < 1 || k < 1) throw DimensionMismatch("chart dimensions must be positive");
  ChartSpec chart{n, k};
  Parser parser(tokenize(src), chart);
  return ScalarField(chart, parser.parse());
}

std::string coordinate_name(const ChartSpec& chart, int index) {
  if (index < chart.n) return "x" + std::to_string(index + 1);
  return "y" + std::to_string(index - chart.n + 1);
}

std::string format_node(const Node& node, const ChartSpec& chart) {
  std::string out;
  emit(node, chart, 0, out);
  return out;
}

std::string format_field(const ScalarField& f) { return format_node(f.root(), f.chart()); }

// ---------------------------------------------------------------------------
// Jet2 arithmetic

Jet2 Jet2::constant(double value, int dim) {
  return Jet2{value, Vec::Zero(dim), Mat::Zero(dim, dim)};
}

Jet2 Jet2::variable(double value, int index, int dim) {
  Jet2 j = constant(value, dim);
  j.grad[index] = 1.0;
  return j;
}

Jet2 operator+(const Jet2& a, const Jet2& b) {
  return Jet2{a.value + b.value, a.grad + b.grad, a.hess + b.hess};
}

Jet2 operator-(const Jet2& a, const Jet2& b) {
  return Jet2{a.value - b.value, a.grad - b.grad, a.hess - b.hess};
}

Jet2 operator-(const Jet2& a) { return Jet2{-a.value, -a.grad, -a.hess}; }

Jet2 operator*(double s, const Jet2& a) { return Jet2{s * a.value, s * a.grad, s * a.hess}; }

Jet2 operator*(const Jet2& a, const Jet2& b) {
  Mat cross = a.grad * b.grad.transpose();
  return Jet2{a.value * b.value, a.value * b.grad + b.value * a.grad,
              a.value * b.hess + b.value * a.hess + cross + cross.transpose()};
}

Jet2 operator/(const Jet2& a, const Jet2& b) {
  const double q = a.value / b.value;
  Vec gq = (a.grad - q * b.grad) / b.value;
  Mat cross = gq * b.grad.transpose();
  Mat hq = (a.hess - q * b.hess - (cross + cross.transpose())) / b.value;
  return Jet2{q, std::move(gq), std::move(hq)};
}

Jet2 chain(const Jet2& a, double f, double df, double d2f) {
  return Jet2{f, df * a.grad, df * a.hess + d2f * (a.grad * a.grad.transpose())};
}

Jet2 sin(const Jet2& a) {
  const double s = std::sin(a.value), c = std::cos(a.value);
  return chain(a, s, c, -s);
}

Jet2 cos(const Jet2& a) {
  const double s = std::sin(a.value), c = std::cos(a.value);
  return chain(a, c, -s, -c);
}

Jet2 exp(const Jet2& a) {
  const double e = std::exp(a.value);
  return chain(a, e, e, e);
}

Jet2 log(const Jet2& a) {
  return chain(a, std::log(a.value), 1.0 / a.value, -1.0 / (a.value * a.value));
}

Jet2 sqrt(const Jet2& a) {
  const double s = std::sqrt(a.value);
  return chain(a, s, 0.5 / s, -0.25 / (s * a.value));
}

Jet2 ipow(const Jet2& a, int exponent) {
  if (exponent == 0) return Jet2::constant(1.0, a.dim());
  if (exponent == 1) return a;
  const double e = exponent;
  return chain(a, std::pow(a.value, exponent), e * std::pow(a.value, exponent - 1),
               e * (e - 1.0) * std::pow(a.value, exponent - 2));
}

Jet2 eval_jet2(const ScalarField& f, const Vec& p) {
  if (p.size() != f.chart().dim()) {
    throw DimensionMismatch("point has length " + std::to_string(p.size()) + ", chart needs " +
                            std::to_string(f.chart().dim()));
  }
  if (f.is_zero()) return Jet2::constant(0.0, f.chart().dim());
  Jet2 j = JetEvaluator(p, f.chart())(f.root());
  j.hess = 0.5 * (j.hess + j.hess.transpose()).eval();
  return j;
}

double eval_value(const ScalarField& f, const Vec& p) {
  if (p.size() != f.chart().dim()) throw DimensionMismatch("point length does not match chart");
  return eval_node(f.root(), p, f.chart());
}

}  // namespace ksym
