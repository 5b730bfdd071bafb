#pragma once

#include <cmath>
#include <random>
#include <string>

#include "ksym/chart.hpp"
#include "ksym/expr.hpp"
#include "ksym/spec_io.hpp"

namespace ksym::testing {

inline std::string fixture(const std::string& name) { return std::string(KSYM_FIXTURE_DIR) + "/" + name; }

inline Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

inline ManifoldSpec one_t(int n, int k, const char* t, Vec base = {}) {
  ManifoldSpec s(n, k);
  s.set_t(1, 1, 1, t);
  if (base.size()) s.set_base_point(base);
  return s;
}

inline ManifoldSpec flat11() { return ManifoldSpec(1, 1); }
inline ManifoldSpec curved11() { return one_t(1, 1, "y1^2/2", vec({0, 1})); }
inline ManifoldSpec const11() { return one_t(1, 1, "1"); }
inline ManifoldSpec linear11() { return one_t(1, 1, "x1"); }

/// n = 2, k = 1 with t_1^{1,1} = y1^2/2 and t_2^{1,2} = y2^2/2.
inline ManifoldSpec curved21() {
  ManifoldSpec s(2, 1);
  s.set_t(1, 1, 1, "y1^2/2");
  s.set_t(2, 1, 2, "y2^2/2");
  return s;
}

/// A k = 2 spec passing validation: each t^{alpha 1} is affine in its own
/// y-block with a common slope depending on x only.
inline ManifoldSpec valid_k2() {
  ManifoldSpec s(1, 2);
  s.set_t(1, 1, 1, "x1*y1 + sin(x1)");
  s.set_t(1, 2, 1, "x1*y2 + cos(x1)^2");
  return s;
}

inline Vec random_point(std::mt19937_64& rng, int dim, double r) {
  std::uniform_real_distribution<double> u(-r, r);
  Vec p(dim);
  for (int i = 0; i < dim; ++i) p[i] = u(rng);
  return p;
}

/// Random tree over variables 0..dim-1 that is smooth and moderate on [-1,1]^dim
/// (literals in [0.1, 1.5]).
inline NodePtr random_tree(std::mt19937_64& rng, int dim, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 9);
  std::uniform_int_distribution<int> var(0, dim - 1);
  std::uniform_int_distribution<int> lit(1, 15);
  switch (pick(rng)) {
    case 0:
      return ast::lit(lit(rng) / 10.0);
    case 1:
      return ast::var(var(rng));
    case 2:
      return ast::bin('+', random_tree(rng, dim, depth - 1), random_tree(rng, dim, depth - 1));
    case 3:
      return ast::bin('-', random_tree(rng, dim, depth - 1), random_tree(rng, dim, depth - 1));
    case 4:
      return ast::bin('*', random_tree(rng, dim, depth - 1), random_tree(rng, dim, depth - 1));
    case 5: {
      NodePtr den = ast::bin('+', ast::lit(2), ast::pow(random_tree(rng, dim, depth - 1), 2));
      return ast::bin('/', random_tree(rng, dim, depth - 1), den);
    }
    case 6:
      return ast::call(std::uniform_int_distribution<int>(0, 1)(rng) ? Func::Sin : Func::Cos,
                       random_tree(rng, dim, depth - 1));
    case 7:
      return ast::call(Func::Exp, ast::call(Func::Sin, random_tree(rng, dim, depth - 1)));
    case 8: {
      NodePtr arg = ast::bin('+', ast::lit(3), ast::call(Func::Cos, random_tree(rng, dim, depth - 1)));
      return ast::call(std::uniform_int_distribution<int>(0, 1)(rng) ? Func::Log : Func::Sqrt, arg);
    }
    default:
      return ast::neg(ast::pow(random_tree(rng, dim, depth - 1), std::uniform_int_distribution<int>(2, 3)(rng)));
  }
}

struct FdJet {
  Vec grad;
  Mat hess;
};

/// Central differences of value (gradient) and of the value again (Hessian).
inline FdJet fd_jet(const ScalarField& f, const Vec& p, double h) {
  const int d = static_cast<int>(p.size());
  FdJet out{Vec::Zero(d), Mat::Zero(d, d)};
  auto at = [&](int i, double si, int j, double sj) {
    Vec q = p;
    if (i >= 0) q[i] += si;
    if (j >= 0) q[j] += sj;
    return eval_value(f, q);
  };
  const double f0 = eval_value(f, p);
  for (int i = 0; i < d; ++i) {
    out.grad[i] = (at(i, h, -1, 0) - at(i, -h, -1, 0)) / (2 * h);
    out.hess(i, i) = (at(i, h, -1, 0) - 2 * f0 + at(i, -h, -1, 0)) / (h * h);
    for (int j = i + 1; j < d; ++j) {
      out.hess(i, j) = out.hess(j, i) =
          (at(i, h, j, h) - at(i, h, j, -h) - at(i, -h, j, h) + at(i, -h, j, -h)) / (4 * h * h);
    }
  }
  return out;
}

}  // namespace ksym::testing
