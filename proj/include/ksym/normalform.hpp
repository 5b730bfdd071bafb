#pragma once

// Flat normal form: parallel frames and the flow-parameter chart in which the
// forms, the foliation and Q all take their standard shape.

#include <vector>

#include "ksym/chart.hpp"
#include "ksym/connection.hpp"

namespace ksym {

/// Throws NotFlat unless the curvature stays below 1e-9 at 50 seeded points of `region`.
void require_flat(const ManifoldSpec& spec, const Box& region);

/// The adapted frame at x0 transported to p along the coordinate polyline
/// moving x first, then y. Compared against the y-first polyline (1e-7).
/// Columns in the coordinate basis.
Mat parallel_frame(const ManifoldSpec& spec, const Vec& x0, const Vec& p, int steps = 200);

/// p = Phi^{E_{order[last]}}_{a} o ... o Phi^{E_{order[0]}}_{a}(x0): flows are
/// applied in `order`, by default the Y block (from the last index down) and
/// then the X block.
class CoordinateMap {
 public:
  CoordinateMap(ManifoldSpec spec, Vec base, Box region, int flow_steps = 64);

  const Vec& base() const { return base_; }
  const Box& region() const { return region_; }
  const Mat& base_frame() const { return base_frame_; }
  const std::vector<int>& order() const { return order_; }
  CoordinateMap with_order(std::vector<int> order) const;

  /// New coordinates of p (Newton on the parameters, at most 50 iterations).
  Vec forward(const Vec& p) const;
  /// Point with new coordinates a (direct flow composition).
  Vec inverse(const Vec& a) const;

 private:
  struct Composed {
    Vec point;
    Mat frame;  // parallel frame at the point, adapted-frame components
  };
  Composed compose(const Vec& a) const;

  ManifoldSpec spec_;
  Vec base_;
  Box region_;
  Mat base_frame_;
  std::vector<int> order_;
  int flow_steps_;
};

/// Checks flatness and commutation of the parallel fields (torsion below
/// 1e-7 at the sampled points), then returns the flow-parameter chart.
CoordinateMap normal_form_chart(const ManifoldSpec& spec, const Vec& x0, const Box& region);

/// Pull-back of every omega_alpha through the inverse map (difference step
/// 1e-5) compared with the standard coefficients, together with the y'
/// components of the pushed-forward X_i, on a grid x grid sample of the
/// (x'_1, y'_1) plane. Returns the max deviation.
double verify_normal_form(const CoordinateMap& map, const ManifoldSpec& spec, int grid);

/// max |forward_order1(p) - forward_order2(p)| over the probes, the second
/// order applying the X block first.
double order_independence(const CoordinateMap& map, const std::vector<Vec>& probes);

}  // namespace ksym
