#include "ksym/chart.hpp"

#include <string>

#include "ksym/errors.hpp"
#include "ksym/structures.hpp"

namespace ksym {

int flat_index(const ChartSpec& chart, const CoordLabel& label) {
  if (label.i < 1 || label.i > chart.n) {
    throw IndexOutOfRange("coordinate index " + std::to_string(label.i) + " outside 1.." +
                          std::to_string(chart.n));
  }
  if (label.kind == CoordLabel::Kind::X) return label.i - 1;
  if (label.alpha < 1 || label.alpha > chart.k) {
    throw IndexOutOfRange("block index " + std::to_string(label.alpha) + " outside 1.." +
                          std::to_string(chart.k));
  }
  return chart.n + (label.alpha - 1) * chart.n + label.i - 1;
}

int frame_block(const ChartSpec& chart, int frame_index) {
  if (frame_index < 0 || frame_index >= chart.dim()) {
    throw IndexOutOfRange("frame index " + std::to_string(frame_index) + " out of range");
  }
  if (frame_index < chart.n) return 0;
  return (frame_index - chart.n) / chart.n + 1;
}

Box Box::cube(int dim, double lo, double hi) {
  return Box{Vec::Constant(dim, lo), Vec::Constant(dim, hi)};
}

void check_point(const ChartSpec& chart, const Vec& p) {
  if (p.size() != chart.dim()) {
    throw DimensionMismatch("point has length " + std::to_string(p.size()) + ", chart needs " +
                            std::to_string(chart.dim()));
  }
}

// ---------------------------------------------------------------------------

ManifoldSpec::ManifoldSpec(int n, int k)
    : chart_{n, k},
      base_point_(Vec::Zero(n * (k + 1))),
      region_(Box::cube(n * (k + 1), -1.0, 1.0)) {
  if (n < 1 || k < 1) throw DimensionMismatch("n and k must be positive");
  t_.assign(static_cast<std::size_t>(n * k * n), ScalarField(chart_));
}

int ManifoldSpec::t_slot(int i, int alpha, int j) const {
  if (i < 1 || i > chart_.n || j < 1 || j > chart_.n || alpha < 1 || alpha > chart_.k) {
    throw IndexOutOfRange("t index (" + std::to_string(i) + "," + std::to_string(alpha) + "," +
                          std::to_string(j) + ") out of range");
  }
  return ((i - 1) * chart_.k + (alpha - 1)) * chart_.n + (j - 1);
}

const ScalarField& ManifoldSpec::t(int i, int alpha, int j) const {
  return t_[static_cast<std::size_t>(t_slot(i, alpha, j))];
}

ManifoldSpec& ManifoldSpec::set_t(int i, int alpha, int j, ScalarField f) {
  if (!(f.chart() == chart_)) throw DimensionMismatch("field chart differs from manifold chart");
  t_[static_cast<std::size_t>(t_slot(i, alpha, j))] = std::move(f);
  return *this;
}

ManifoldSpec& ManifoldSpec::set_t(int i, int alpha, int j, std::string_view src) {
  return set_t(i, alpha, j, parse_scalar_field(src, chart_.n, chart_.k));
}

ManifoldSpec& ManifoldSpec::set_base_point(Vec p) {
  check_point(chart_, p);
  base_point_ = std::move(p);
  return *this;
}

ManifoldSpec& ManifoldSpec::set_region(Box box) {
  if (box.dim() != dim() || box.hi.size() != dim()) throw DimensionMismatch("region dimension");
  region_ = std::move(box);
  return *this;
}

ManifoldSpec& ManifoldSpec::set_metric(MetricSpec metric) {
  if (metric.kind == MetricKind::Field &&
      metric.entries.size() != static_cast<std::size_t>(dim() * dim())) {
    throw DimensionMismatch("metric needs dim x dim entries");
  }
  metric_ = std::move(metric);
  return *this;
}

ManifoldSpec& ManifoldSpec::set_forms(std::vector<TwoFormField> forms) {
  if (!forms.empty() && forms.size() != static_cast<std::size_t>(chart_.k)) {
    throw DimensionMismatch("need exactly k forms");
  }
  for (const auto& f : forms) {
    if (!(f.chart() == chart_)) throw DimensionMismatch("form chart differs from manifold chart");
  }
  forms_ = std::move(forms);
  return *this;
}

TwoFormField ManifoldSpec::omega(int alpha) const {
  if (alpha < 1 || alpha > chart_.k) throw IndexOutOfRange("form index out of range");
  if (forms_.empty()) return standard_omega(chart_, alpha);
  return forms_[static_cast<std::size_t>(alpha - 1)];
}

// ---------------------------------------------------------------------------

double FrameJet::dt_dy(int i, int alpha, int j, int beta, int h) const {
  return t_at(i, alpha, j).grad[y_index(chart, beta, h)];
}

double FrameJet::d2t(int i, int alpha, int j, int beta, int h, int m) const {
  return t_at(i, alpha, j).hess(y_index(chart, beta, h), m);
}

Vec FrameJet::bracket_coords(int a, int b) const {
  return jacobian[static_cast<std::size_t>(b)] * frame.col(a) -
         jacobian[static_cast<std::size_t>(a)] * frame.col(b);
}

Vec FrameJet::bracket(int a, int b) const { return inverse * bracket_coords(a, b); }

FrameJet frame_jet(const ManifoldSpec& spec, const Vec& p) {
  const ChartSpec& c = spec.chart();
  check_point(c, p);
  const int dim = c.dim();
  FrameJet fj;
  fj.chart = c;
  fj.point = p;
  fj.t.reserve(spec.t_table().size());
  for (const auto& f : spec.t_table()) fj.t.push_back(eval_jet2(f, p));
  fj.frame = Mat::Identity(dim, dim);
  fj.inverse = Mat::Identity(dim, dim);
  fj.jacobian.assign(static_cast<std::size_t>(dim), Mat::Zero(dim, dim));
  for (int i = 1; i <= c.n; ++i) {
    const int xi = x_index(c, i);
    for (int alpha = 1; alpha <= c.k; ++alpha) {
      for (int j = 1; j <= c.n; ++j) {
        const int row = y_index(c, alpha, j);
        const Jet2& t = fj.t_at(i, alpha, j);
        fj.frame(row, xi) = -t.value;
        fj.inverse(row, xi) = t.value;
        fj.jacobian[static_cast<std::size_t>(xi)].row(row) = -t.grad.transpose();
      }
    }
  }
  return fj;
}

void frame_and_inverse(const ManifoldSpec& spec, const Vec& p, Mat& frame, Mat& inverse) {
  const ChartSpec& c = spec.chart();
  check_point(c, p);
  frame = Mat::Identity(c.dim(), c.dim());
  inverse = Mat::Identity(c.dim(), c.dim());
  for (int i = 1; i <= c.n; ++i) {
    for (int alpha = 1; alpha <= c.k; ++alpha) {
      for (int j = 1; j <= c.n; ++j) {
        const ScalarField& f = spec.t(i, alpha, j);
        if (f.is_zero()) continue;
        const double t = eval_value(f, p);
        frame(y_index(c, alpha, j), x_index(c, i)) = -t;
        inverse(y_index(c, alpha, j), x_index(c, i)) = t;
      }
    }
  }
}

AdaptedFrame adapted_frame_at(const ManifoldSpec& spec, const Vec& p) {
  Mat frame, inverse;
  frame_and_inverse(spec, p, frame, inverse);
  return AdaptedFrame{std::move(frame)};
}

Vec frame_bracket_at(const ManifoldSpec& spec, const Vec& p, int a, int b) {
  const int dim = spec.dim();
  if (a < 0 || a >= dim || b < 0 || b >= dim) throw IndexOutOfRange("frame index out of range");
  return frame_jet(spec, p).bracket(a, b);
}

}  // namespace ksym
