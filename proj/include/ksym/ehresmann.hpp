#pragma once

// Rectangles spanned by a vertical geodesic and a horizontal curve: transport
// the vertical velocity along the horizontal curve, then shoot geodesics.

#include <vector>

#include "ksym/chart.hpp"
#include "ksym/connection.hpp"

namespace ksym {

/// RK4 for gamma' = sum_i c_i X_i(gamma) on [0, T].
Curve horizontal_integral_curve(const ManifoldSpec& spec, const Vec& p0, const Vec& direction,
                                double T, int steps);

/// Horizontal curve from p0 whose x-projection follows that of `guide`.
Curve horizontal_lift(const ManifoldSpec& spec, const Vec& p0, const Curve& guide, int steps);

struct Rectangle {
  Curve alpha;  // vertical edge, parameter t
  Curve beta;   // horizontal edge, parameter s
  std::vector<double> t;  // grid times on alpha's domain
  std::vector<double> s;  // grid times on beta's domain
  std::vector<std::vector<Vec>> sigma;  // sigma[j][i] = sigma(t_i, s_j)
  std::vector<Vec> transported;         // v_{s_j}, coordinate basis
  double tangency = 0.0;                // max |x-component| of the v_s
};

struct RectangleOptions {
  int nt = 20;
  int ns = 20;
  int substeps = 20;  // integrator steps per grid cell
  int threads = 0;
};

/// Checks alpha vertical, beta horizontal (1e-6) and alpha geodesic (1e-6)
/// before building the grid.
Rectangle build_rectangle(const ManifoldSpec& spec, const Curve& alpha, const Curve& beta,
                          const RectangleOptions& opt = {});

/// Splits alpha at the given interior knots and stacks rectangles; each new
/// horizontal edge is the lift of beta through the previous top corner.
std::vector<Rectangle> build_rectangle_chain(const ManifoldSpec& spec, const Curve& alpha,
                                             const Curve& beta, const std::vector<double>& knots,
                                             const RectangleOptions& opt = {});

/// Max of: x-components of t-direction difference tangents, vertical frame
/// components of s-direction difference tangents (frame at the midpoint),
/// and edge mismatches against alpha and beta.
double verify_rectangle(const Rectangle& rect, const ManifoldSpec& spec);

/// max |nabla_{c'} c'| in frame components at the interior samples of c.
double geodesic_residual(const ManifoldSpec& spec, const Curve& c);

}  // namespace ksym
