#pragma once

// Index conventions of the Darboux chart, the manifold presentation and the
// adapted frame {X_1..X_n, Y_{1,1}..Y_{k,n}}.
//
// Frame indices follow the coordinate layout: frame index i-1 is X_i and
// frame index n + (a-1)n + i - 1 is Y_{a,i}.  With this layout the adapted
// frame matrix is unit lower triangular.

#include <string>
#include <string_view>
#include <vector>

#include "ksym/expr.hpp"
#include "ksym/two_form.hpp"
#include "ksym/types.hpp"

namespace ksym {

/// Either x_i or y_{(a-1)n+i}, with 1-based indices.
struct CoordLabel {
  enum class Kind { X, Y } kind;
  int alpha;  // unused for X
  int i;

  static CoordLabel x(int i) { return {Kind::X, 0, i}; }
  static CoordLabel y(int alpha, int i) { return {Kind::Y, alpha, i}; }
};

int flat_index(const ChartSpec& chart, const CoordLabel& label);

/// Flat index of x_i (1-based i).
inline int x_index(const ChartSpec& chart, int i) { return flat_index(chart, CoordLabel::x(i)); }
/// Flat index of y_{(alpha-1)n+i}.
inline int y_index(const ChartSpec& chart, int alpha, int i) {
  return flat_index(chart, CoordLabel::y(alpha, i));
}

/// 0 for the X (horizontal) block, alpha for the L_alpha block.
int frame_block(const ChartSpec& chart, int frame_index);

struct Box {
  Vec lo;
  Vec hi;

  static Box cube(int dim, double lo, double hi);
  int dim() const { return static_cast<int>(lo.size()); }
};

enum class MetricKind {
  CoordinateIdentity,  // identity in the coordinate basis
  AdaptedIdentity,     // identity in the adapted frame
  Field,               // user-supplied symmetric matrix of scalar fields
};

struct MetricSpec {
  MetricKind kind = MetricKind::CoordinateIdentity;
  std::vector<ScalarField> entries;  // row-major dim x dim, only for Field
};

/// A Darboux-chart presentation: the t-table defining Q, metric, forms and a
/// base point.
class ManifoldSpec {
 public:
  /// The standard structure on R^(n(k+1)): all t = 0, base point at the origin.
  ManifoldSpec(int n, int k);

  const ChartSpec& chart() const { return chart_; }
  int dim() const { return chart_.dim(); }

  const ScalarField& t(int i, int alpha, int j) const;
  ManifoldSpec& set_t(int i, int alpha, int j, ScalarField f);
  ManifoldSpec& set_t(int i, int alpha, int j, std::string_view src);

  /// Position of t_i^{alpha j} in the flattened table.
  int t_slot(int i, int alpha, int j) const;
  const std::vector<ScalarField>& t_table() const { return t_; }

  const Vec& base_point() const { return base_point_; }
  ManifoldSpec& set_base_point(Vec p);

  const Box& region() const { return region_; }
  ManifoldSpec& set_region(Box box);

  const MetricSpec& metric() const { return metric_; }
  ManifoldSpec& set_metric(MetricSpec metric);

  /// User 2-forms; empty means the standard Darboux forms.
  const std::vector<TwoFormField>& forms() const { return forms_; }
  ManifoldSpec& set_forms(std::vector<TwoFormField> forms);

  /// omega_alpha, standard unless overridden.
  TwoFormField omega(int alpha) const;

 private:
  ChartSpec chart_;
  std::vector<ScalarField> t_;
  Vec base_point_;
  Box region_;
  MetricSpec metric_;
  std::vector<TwoFormField> forms_;
};

/// Columns are X_1..X_n then Y_{1,1}..Y_{k,n} in the coordinate basis.
struct AdaptedFrame {
  Mat matrix;
};

/// Everything first-order about the frame at a point, plus the t jets.
struct FrameJet {
  ChartSpec chart;
  Vec point;
  std::vector<Jet2> t;  // indexed by ManifoldSpec::t_slot
  Mat frame;
  Mat inverse;
  std::vector<Mat> jacobian;  // jacobian[a](r, m) = d frame(r, a) / d x_m

  const Jet2& t_at(int i, int alpha, int j) const {
    return t[static_cast<std::size_t>(((i - 1) * chart.k + (alpha - 1)) * chart.n + (j - 1))];
  }
  /// d t_i^{alpha j} / d y_{(beta-1)n+h}
  double dt_dy(int i, int alpha, int j, int beta, int h) const;
  /// d^2 t_i^{alpha j} / d y_{(beta-1)n+h} d x_m (x_m any flat coordinate)
  double d2t(int i, int alpha, int j, int beta, int h, int m) const;

  /// Lie bracket of frame fields a and b in the coordinate basis.
  Vec bracket_coords(int a, int b) const;
  /// Lie bracket of frame fields a and b expressed in the adapted frame.
  Vec bracket(int a, int b) const;
};

FrameJet frame_jet(const ManifoldSpec& spec, const Vec& p);

AdaptedFrame adapted_frame_at(const ManifoldSpec& spec, const Vec& p);

/// Frame matrix and its inverse without derivative information.
void frame_and_inverse(const ManifoldSpec& spec, const Vec& p, Mat& frame, Mat& inverse);

Vec frame_bracket_at(const ManifoldSpec& spec, const Vec& p, int a, int b);

void check_point(const ChartSpec& chart, const Vec& p);

}  // namespace ksym
