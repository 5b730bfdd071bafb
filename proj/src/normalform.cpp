#include "ksym/normalform.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/LU>

#include "ksym/errors.hpp"
#include "ksym/structures.hpp"

namespace ksym {

namespace {

constexpr double kFdStep = 1e-5;

std::vector<Vec> region_samples(const ManifoldSpec& spec, const Box& region, int count) {
  SamplingPlan plan;
  plan.sample_count = count;
  plan.box = region;
  return plan.points(spec.chart());
}

Mat transport_polyline(const ManifoldSpec& spec, const std::vector<Vec>& corners, Mat m,
                       int steps) {
  for (std::size_t i = 0; i + 1 < corners.size(); ++i) {
    const Curve leg = Curve::line(corners[i], corners[i + 1] - corners[i], 1.0);
    m = parallel_transport_frame(spec, leg, m, steps);
  }
  return m;
}

}  // namespace

void require_flat(const ManifoldSpec& spec, const Box& region) {
  for (const Vec& q : region_samples(spec, region, 50)) {
    const double r = curvature_at(spec, q).max_abs();
    if (r >= 1e-9) {
      throw NotFlat("curvature " + std::to_string(r) + " at a sampled point of the region");
    }
  }
}

Mat parallel_frame(const ManifoldSpec& spec, const Vec& x0, const Vec& p, int steps) {
  check_point(spec.chart(), x0);
  check_point(spec.chart(), p);
  require_flat(spec, spec.region());
  const int n = spec.chart().n;
  Mat frame, inverse;
  frame_and_inverse(spec, x0, frame, inverse);

  Vec mid1 = x0, mid2 = p;
  mid1.head(n) = p.head(n);
  mid2.head(n) = x0.head(n);
  const Mat m1 = transport_polyline(spec, {x0, mid1, p}, frame, steps);
  const Mat m2 = transport_polyline(spec, {x0, mid2, p}, frame, steps);
  const double gap = (m1 - m2).cwiseAbs().maxCoeff();
  if (gap > 1e-7) {
    throw PathDependence("transported frames differ by " + std::to_string(gap) +
                         " between the two polylines");
  }
  return m1;
}

// ---------------------------------------------------------------------------

CoordinateMap::CoordinateMap(ManifoldSpec spec, Vec base, Box region, int flow_steps)
    : spec_(std::move(spec)), base_(std::move(base)), region_(std::move(region)),
      flow_steps_(flow_steps) {
  check_point(spec_.chart(), base_);
  Mat inverse;
  frame_and_inverse(spec_, base_, base_frame_, inverse);
  for (int l = spec_.dim() - 1; l >= 0; --l) order_.push_back(l);
}

CoordinateMap CoordinateMap::with_order(std::vector<int> order) const {
  std::vector<int> sorted = order;
  std::sort(sorted.begin(), sorted.end());
  for (int l = 0; l < spec_.dim(); ++l) {
    if (static_cast<int>(sorted.size()) != spec_.dim() || sorted[static_cast<std::size_t>(l)] != l) {
      throw Error("flow order must be a permutation of the frame indices");
    }
  }
  CoordinateMap out = *this;
  out.order_ = std::move(order);
  return out;
}

CoordinateMap::Composed CoordinateMap::compose(const Vec& a) const {
  const int dim = spec_.dim();
  if (a.size() != dim) throw DimensionMismatch("parameter vector does not match the chart");

  // state: point and parallel frame in adapted components; flow along column l
  Vec q = base_;
  Mat c = Mat::Identity(dim, dim);
  for (int l : order_) {
    const double T = a[l];
    if (T == 0.0) continue;
    const double h = T / flow_steps_;
    auto rhs = [&](const Vec& x, const Mat& cm, Vec& dx, Mat& dc) {
      const FrameJet fj = frame_jet(spec_, x);
      const Vec w = cm.col(l);
      dx = fj.frame * w;
      dc = -contract_direction(connection_jet_at(fj).gamma, w) * cm;
    };
    for (int s = 0; s < flow_steps_; ++s) {
      Vec d1, d2, d3, d4;
      Mat e1, e2, e3, e4;
      rhs(q, c, d1, e1);
      rhs(q + h / 2 * d1, c + h / 2 * e1, d2, e2);
      rhs(q + h / 2 * d2, c + h / 2 * e2, d3, e3);
      rhs(q + h * d3, c + h * e3, d4, e4);
      q += h / 6 * (d1 + 2 * d2 + 2 * d3 + d4);
      c += h / 6 * (e1 + 2 * e2 + 2 * e3 + e4);
      if (!q.allFinite() || q.cwiseAbs().maxCoeff() > 1e6) {
        throw IncompleteLeaf("flow of a parallel field leaves the chart");
      }
    }
  }
  return Composed{q, c};
}

Vec CoordinateMap::inverse(const Vec& a) const { return compose(a).point; }

Vec CoordinateMap::forward(const Vec& p) const {
  check_point(spec_.chart(), p);
  Vec a = p - base_;
  const double tol = 1e-13 * (1.0 + p.cwiseAbs().maxCoeff());
  for (int it = 0; it < 50; ++it) {
    const Composed cm = compose(a);
    const Vec r = cm.point - p;
    if (r.cwiseAbs().maxCoeff() <= tol) return a;
    Mat frame, inverse;
    frame_and_inverse(spec_, cm.point, frame, inverse);
    const Mat jac = frame * cm.frame;
    const Eigen::PartialPivLU<Mat> lu(jac);
    if (!(std::abs(lu.determinant()) > 1e-8)) {
      throw NewtonDivergence("flow Jacobian is singular near the point");
    }
    a -= lu.solve(r);
    if (!a.allFinite()) break;
  }
  const Vec r = compose(a).point - p;
  if (r.cwiseAbs().maxCoeff() <= 1e3 * tol) return a;
  throw NewtonDivergence("no convergence after 50 iterations (residual " +
                         std::to_string(r.cwiseAbs().maxCoeff()) + ")");
}

CoordinateMap normal_form_chart(const ManifoldSpec& spec, const Vec& x0, const Box& region) {
  check_point(spec.chart(), x0);
  require_flat(spec, region);
  for (const Vec& q : region_samples(spec, region, 50)) {
    const double t = torsion_at(spec, q).max_abs();
    if (t > 1e-7) {
      throw NotFlat("parallel fields fail to commute: torsion " + std::to_string(t));
    }
  }
  return CoordinateMap(spec, x0, region);
}

double verify_normal_form(const CoordinateMap& map, const ManifoldSpec& spec, int grid) {
  const ChartSpec& c = spec.chart();
  const int n = c.n, dim = c.dim();
  if (grid < 2) throw Error("grid needs at least 2 nodes per side");
  const Vec& x0 = map.base();
  const Box& box = map.region();
  const int xi = x_index(c, 1), yi = y_index(c, 1, 1);

  std::vector<Mat> standard;
  for (int alpha = 1; alpha <= c.k; ++alpha) standard.push_back(standard_omega(c, alpha).matrix_at(x0));

  double worst = 0.0;
  for (int u = 0; u < grid; ++u) {
    for (int v = 0; v < grid; ++v) {
      Vec a = Vec::Zero(dim);
      a[xi] = box.lo[xi] - x0[xi] + (box.hi[xi] - box.lo[xi]) * u / (grid - 1);
      a[yi] = box.lo[yi] - x0[yi] + (box.hi[yi] - box.lo[yi]) * v / (grid - 1);
      const Vec p = map.inverse(a);
      Mat jac(dim, dim);
      for (int m = 0; m < dim; ++m) {
        Vec lo = a, hi = a;
        lo[m] -= kFdStep;
        hi[m] += kFdStep;
        jac.col(m) = (map.inverse(hi) - map.inverse(lo)) / (2 * kFdStep);
      }
      for (int alpha = 1; alpha <= c.k; ++alpha) {
        const Mat pulled = jac.transpose() * spec.omega(alpha).matrix_at(p) * jac;
        worst = std::max(worst, (pulled - standard[static_cast<std::size_t>(alpha - 1)]).cwiseAbs().maxCoeff());
      }
      Mat frame, inverse;
      frame_and_inverse(spec, p, frame, inverse);
      const Mat pushed = jac.partialPivLu().solve(frame.leftCols(n));
      worst = std::max(worst, pushed.bottomRows(dim - n).cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

double order_independence(const CoordinateMap& map, const std::vector<Vec>& probes) {
  const int dim = static_cast<int>(map.base().size());
  std::vector<int> x_first;
  for (int l = 0; l < dim; ++l) x_first.push_back(l);
  const CoordinateMap other = map.with_order(x_first);
  double worst = 0.0;
  for (const Vec& p : probes) {
    worst = std::max(worst, (map.forward(p) - other.forward(p)).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace ksym
