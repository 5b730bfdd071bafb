#pragma once

#include <map>
#include <utility>
#include <vector>

#include "ksym/expr.hpp"
#include "ksym/types.hpp"

namespace ksym {

/// A 2-form with scalar-field coefficients c_{lm}, l < m, over flat indices.
///
/// Evaluation convention: w(u, v) = sum_{l<m} c_{lm} (u_l v_m - u_m v_l), so
/// the standard dx^dy carries c = 1/2 and (dx^dy)(d/dx, d/dy) = 1/2.
class TwoFormField {
 public:
  explicit TwoFormField(ChartSpec chart) : chart_(chart) {}

  const ChartSpec& chart() const { return chart_; }

  /// Sets c_{lm}; (l, m) with l > m stores -f at (m, l).
  void set(int l, int m, ScalarField f);
  void set_constant(int l, int m, double value);

  /// Nonzero entries keyed by (l, m) with l < m.
  const std::map<std::pair<int, int>, ScalarField>& entries() const { return entries_; }

  /// Antisymmetric matrix W with w(u, v) = u^T W v at p.
  Mat matrix_at(const Vec& p) const;

  /// W at p together with dW/dx_m for every coordinate m.
  struct Jet {
    Mat value;
    std::vector<Mat> partials;
  };
  Jet jet_at(const Vec& p) const;

 private:
  ChartSpec chart_;
  std::map<std::pair<int, int>, ScalarField> entries_;
};

}  // namespace ksym
