#pragma once

// The canonical connection in the adapted frame: coefficients (closed form
// and a linear-solve reconstruction), torsion, curvature, and the ODE
// integrators built on it.

#include <vector>

#include "ksym/chart.hpp"
#include "ksym/types.hpp"

namespace ksym {

/// T(c, a, b): component c of a quantity indexed by the ordered frame pair (a, b).
class Tensor3 {
 public:
  Tensor3() = default;
  explicit Tensor3(int dim) : dim_(dim), v_(static_cast<std::size_t>(dim * dim * dim), 0.0) {}

  int dim() const { return dim_; }
  double& operator()(int c, int a, int b) { return v_[idx(c, a, b)]; }
  double operator()(int c, int a, int b) const { return v_[idx(c, a, b)]; }
  double max_abs() const;
  double max_abs_diff(const Tensor3& o) const;

 private:
  std::size_t idx(int c, int a, int b) const {
    return static_cast<std::size_t>((c * dim_ + a) * dim_ + b);
  }
  int dim_ = 0;
  std::vector<double> v_;
};

/// Gamma(c, a, b): nabla_{e_a} e_b = sum_c Gamma(c, a, b) e_c.
using ConnCoeffs = Tensor3;

/// R(d, a, b, c): e_d-component of R(e_a, e_b) e_c.
class Tensor4 {
 public:
  Tensor4() = default;
  explicit Tensor4(int dim)
      : dim_(dim), v_(static_cast<std::size_t>(dim * dim * dim * dim), 0.0) {}

  int dim() const { return dim_; }
  double& operator()(int d, int a, int b, int c) { return v_[idx(d, a, b, c)]; }
  double operator()(int d, int a, int b, int c) const { return v_[idx(d, a, b, c)]; }
  double max_abs() const;
  double max_abs_diff(const Tensor4& o) const;

 private:
  std::size_t idx(int d, int a, int b, int c) const {
    return static_cast<std::size_t>(((d * dim_ + a) * dim_ + b) * dim_ + c);
  }
  int dim_ = 0;
  std::vector<double> v_;
};

/// Coefficients with their coordinate partials: partial[m](c, a, b) = d Gamma(c,a,b) / d x_m.
struct ConnJet {
  ConnCoeffs gamma;
  std::vector<Tensor3> partial;
};

/// Closed-form coefficients from the first y-derivatives of t. The X-X
/// coefficients use alpha = 1 after checking alpha-independence to 1e-9.
ConnCoeffs connection_coeffs_at(const ManifoldSpec& spec, const Vec& p);
ConnJet connection_jet_at(const FrameJet& fj);

/// Reconstruction from brackets and the parallelism relations for omega_alpha,
/// solved as n x n linear systems per frame pair.
ConnCoeffs coeffs_from_defining_relations(const ManifoldSpec& spec, const Vec& p);

/// T(c, a, b) = Gamma(c,a,b) - Gamma(c,b,a) - [e_a, e_b]^c.
Tensor3 torsion_at(const ManifoldSpec& spec, const Vec& p);

/// Bracket definition R(a,b)c = nabla_a nabla_b c - nabla_b nabla_a c - nabla_[a,b] c
/// with exact derivatives of the coefficients.
Tensor4 curvature_at(const ManifoldSpec& spec, const Vec& p);
Tensor4 curvature_from(const FrameJet& fj, const ConnJet& cj);

/// Curvature filled in from second y-derivatives of t.
Tensor4 curvature_closed_form_at(const ManifoldSpec& spec, const Vec& p);

/// max |e_a(w(e_b,e_c)) - w(nabla_a e_b, e_c) - w(e_b, nabla_a e_c)| over all
/// alpha and frame triples.
double nabla_omega_residual(const ManifoldSpec& spec, const Vec& p);

/// Piecewise cubic Hermite curve through timed samples with velocities.
class Curve {
 public:
  Curve(std::vector<double> times, std::vector<Vec> points, std::vector<Vec> velocities);

  /// Velocities estimated by finite differences of neighbouring samples.
  static Curve from_samples(std::vector<double> times, std::vector<Vec> points);
  /// p0 + t v on [0, T].
  static Curve line(const Vec& p0, const Vec& v, double T, int samples = 2);

  double t0() const { return times_.front(); }
  double t1() const { return times_.back(); }
  int dim() const { return static_cast<int>(points_.front().size()); }
  const std::vector<double>& times() const { return times_; }
  const std::vector<Vec>& points() const { return points_; }
  const std::vector<Vec>& velocities() const { return velocities_; }

  Vec position(double t) const;
  Vec velocity(double t) const;
  Vec start() const { return points_.front(); }
  Vec end() const { return points_.back(); }

 private:
  std::size_t segment(double t) const;

  std::vector<double> times_;
  std::vector<Vec> points_;
  std::vector<Vec> velocities_;
};

/// RK4 for nabla_{gamma'} V = 0 in adapted-frame components. Returns V at the
/// curve end in the coordinate basis.
Vec parallel_transport(const ManifoldSpec& spec, const Curve& curve, const Vec& v0, int steps);

/// Same, returning V (coordinate basis) after each step, first entry v0.
std::vector<Vec> parallel_transport_path(const ManifoldSpec& spec, const Curve& curve,
                                         const Vec& v0, int steps);

/// Transports every column of `m0` (coordinate basis).
Mat parallel_transport_frame(const ManifoldSpec& spec, const Curve& curve, const Mat& m0,
                             int steps);

/// RK4 for nabla_{gamma'} gamma' = 0 on [0, T]; samples at every step.
/// Throws IncompleteLeaf when a coordinate exceeds 1e6 in magnitude.
Curve geodesic(const ManifoldSpec& spec, const Vec& p0, const Vec& v0, double T, int steps);

/// Gamma(w)(c, b) = sum_a w^a Gamma(c, a, b).
Mat contract_direction(const ConnCoeffs& g, const Vec& w);

}  // namespace ksym
