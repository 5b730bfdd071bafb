#include "ksym/connection.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/LU>

#include "ksym/errors.hpp"
#include "ksym/structures.hpp"

namespace ksym {

double Tensor3::max_abs() const {
  double m = 0.0;
  for (double x : v_) m = std::max(m, std::abs(x));
  return m;
}

double Tensor3::max_abs_diff(const Tensor3& o) const {
  if (o.dim_ != dim_) throw DimensionMismatch("tensor dimensions differ");
  double m = 0.0;
  for (std::size_t i = 0; i < v_.size(); ++i) m = std::max(m, std::abs(v_[i] - o.v_[i]));
  return m;
}

double Tensor4::max_abs() const {
  double m = 0.0;
  for (double x : v_) m = std::max(m, std::abs(x));
  return m;
}

double Tensor4::max_abs_diff(const Tensor4& o) const {
  if (o.dim_ != dim_) throw DimensionMismatch("tensor dimensions differ");
  double m = 0.0;
  for (std::size_t i = 0; i < v_.size(); ++i) m = std::max(m, std::abs(v_[i] - o.v_[i]));
  return m;
}

ConnJet connection_jet_at(const FrameJet& fj) {
  const ChartSpec& c = fj.chart;
  const int n = c.n, k = c.k, dim = c.dim();
  ConnJet cj{Tensor3(dim), std::vector<Tensor3>(static_cast<std::size_t>(dim), Tensor3(dim))};

  // nabla_{X_i} Y_{alpha j} = sum d t_i^{beta h} / d y_{alpha j} Y_{beta h}
  for (int i = 1; i <= n; ++i) {
    const int a = x_index(c, i);
    for (int alpha = 1; alpha <= k; ++alpha) {
      for (int j = 1; j <= n; ++j) {
        const int b = y_index(c, alpha, j);
        for (int beta = 1; beta <= k; ++beta) {
          for (int h = 1; h <= n; ++h) {
            const int e = y_index(c, beta, h);
            const Jet2& t = fj.t_at(i, beta, h);
            cj.gamma(e, a, b) = t.grad[b];
            for (int m = 0; m < dim; ++m) cj.partial[static_cast<std::size_t>(m)](e, a, b) = t.hess(b, m);
          }
        }
      }
    }
  }

  // nabla_{X_i} X_j = - sum d t_i^{1 j} / d y_{1 h} X_h
  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) {
      for (int h = 1; h <= n; ++h) {
        const int yh = y_index(c, 1, h);
        const Jet2& t = fj.t_at(i, 1, j);
        const double v = t.grad[yh];
        for (int alpha = 2; alpha <= k; ++alpha) {
          const double w = fj.t_at(i, alpha, j).grad[y_index(c, alpha, h)];
          if (std::abs(w - v) > 1e-9) {
            throw CompatibilityError("d t_" + std::to_string(i) + "^{" + std::to_string(alpha) +
                                     "," + std::to_string(j) + "} / d y" +
                                     std::to_string(y_index(c, alpha, h) - n + 1) +
                                     " differs from the alpha=1 value by " +
                                     std::to_string(w - v));
          }
        }
        const int a = x_index(c, i), b = x_index(c, j), e = x_index(c, h);
        cj.gamma(e, a, b) = -v;
        for (int m = 0; m < dim; ++m) cj.partial[static_cast<std::size_t>(m)](e, a, b) = -t.hess(yh, m);
      }
    }
  }
  return cj;
}

ConnCoeffs connection_coeffs_at(const ManifoldSpec& spec, const Vec& p) {
  return connection_jet_at(frame_jet(spec, p)).gamma;
}

ConnCoeffs coeffs_from_defining_relations(const ManifoldSpec& spec, const Vec& p) {
  const ChartSpec& c = spec.chart();
  const int n = c.n, k = c.k, dim = c.dim();
  const FrameJet fj = frame_jet(spec, p);

  std::vector<std::vector<Vec>> br(static_cast<std::size_t>(dim),
                                   std::vector<Vec>(static_cast<std::size_t>(dim)));
  for (int a = 0; a < dim; ++a) {
    for (int b = 0; b < dim; ++b) br[a][b] = fj.bracket(a, b);
  }
  std::vector<FormOnFrame> forms;
  for (int alpha = 1; alpha <= k; ++alpha) forms.push_back(form_on_frame(spec.omega(alpha), fj));

  auto solve = [&](const Mat& pairing, const Vec& rhs, const std::string& what) -> Vec {
    Eigen::FullPivLU<Mat> lu(pairing);
    if (lu.rank() < pairing.rows() || pairing.cwiseAbs().maxCoeff() == 0.0) {
      throw SingularSystem("pairing matrix " + what + " is singular");
    }
    return lu.solve(rhs);
  };

  ConnCoeffs g(dim);
  for (int a = 0; a < dim; ++a) {
    const int ablk = frame_block(c, a);
    for (int b = 0; b < dim; ++b) {
      const int bblk = frame_block(c, b);
      if (ablk != 0 && bblk == 0) {
        // nabla_Y X = Q-part of [Y, X]
        for (int e = 0; e < n; ++e) g(e, a, b) = br[a][b][e];
      } else if (ablk == 0 && bblk != 0) {
        // nabla_X Y = L_alpha-part of [X, Y]
        for (int h = 1; h <= n; ++h) {
          const int e = y_index(c, bblk, h);
          g(e, a, b) = br[a][b][e];
        }
      } else if (ablk != 0) {
        // both vertical: omega_alpha(nabla_a e_b, X_l) from the parallelism relation
        const FormOnFrame& w = forms[static_cast<std::size_t>(bblk - 1)];
        Mat pairing(n, n);
        Vec rhs(n);
        for (int l = 1; l <= n; ++l) {
          const int xl = x_index(c, l);
          for (int h = 1; h <= n; ++h) pairing(l - 1, h - 1) = w.values(y_index(c, bblk, h), xl);
          rhs[l - 1] = w.derivs[a](b, xl) - br[a][xl].dot(w.values.row(b));
        }
        const Vec sol = solve(pairing, rhs, "omega_" + std::to_string(bblk) + "(Y, X)");
        for (int h = 1; h <= n; ++h) g(y_index(c, bblk, h), a, b) = sol[h - 1];
      } else {
        // both horizontal: one solve per alpha, all must agree
        Vec first;
        for (int alpha = 1; alpha <= k; ++alpha) {
          const FormOnFrame& w = forms[static_cast<std::size_t>(alpha - 1)];
          Mat pairing(n, n);
          Vec rhs(n);
          for (int l = 1; l <= n; ++l) {
            const int yl = y_index(c, alpha, l);
            for (int h = 1; h <= n; ++h) pairing(l - 1, h - 1) = w.values(x_index(c, h), yl);
            rhs[l - 1] = w.derivs[a](b, yl) - br[a][yl].dot(w.values.row(b));
          }
          const Vec sol = solve(pairing, rhs, "omega_" + std::to_string(alpha) + "(X, Y)");
          if (alpha == 1) {
            first = sol;
          } else if ((sol - first).cwiseAbs().maxCoeff() > 1e-9) {
            throw CompatibilityError("H_1 and H_" + std::to_string(alpha) +
                                     " disagree on frame pair (" + std::to_string(a) + "," +
                                     std::to_string(b) + ")");
          }
        }
        for (int h = 0; h < n; ++h) g(h, a, b) = first[h];
      }
    }
  }
  return g;
}

namespace {

Tensor3 torsion_from(const FrameJet& fj, const ConnCoeffs& g) {
  const int dim = fj.chart.dim();
  Tensor3 t(dim);
  for (int a = 0; a < dim; ++a) {
    for (int b = 0; b < dim; ++b) {
      const Vec br = fj.bracket(a, b);
      for (int e = 0; e < dim; ++e) t(e, a, b) = g(e, a, b) - g(e, b, a) - br[e];
    }
  }
  return t;
}

}  // namespace

Tensor3 torsion_at(const ManifoldSpec& spec, const Vec& p) {
  const FrameJet fj = frame_jet(spec, p);
  return torsion_from(fj, connection_jet_at(fj).gamma);
}

Tensor4 curvature_from(const FrameJet& fj, const ConnJet& cj) {
  const int dim = fj.chart.dim();
  const ConnCoeffs& g = cj.gamma;

  // dg[a](f, b, c) = e_a(Gamma(f, b, c))
  std::vector<Tensor3> dg(static_cast<std::size_t>(dim), Tensor3(dim));
  for (int a = 0; a < dim; ++a) {
    for (int m = 0; m < dim; ++m) {
      const double fa = fj.frame(m, a);
      if (fa == 0.0) continue;
      const Tensor3& pm = cj.partial[static_cast<std::size_t>(m)];
      for (int f = 0; f < dim; ++f) {
        for (int b = 0; b < dim; ++b) {
          for (int c = 0; c < dim; ++c) dg[a](f, b, c) += fa * pm(f, b, c);
        }
      }
    }
  }
  std::vector<std::vector<Vec>> br(static_cast<std::size_t>(dim),
                                   std::vector<Vec>(static_cast<std::size_t>(dim)));
  for (int a = 0; a < dim; ++a) {
    for (int b = 0; b < dim; ++b) br[a][b] = fj.bracket(a, b);
  }

  Tensor4 r(dim);
  for (int a = 0; a < dim; ++a) {
    for (int b = 0; b < dim; ++b) {
      if (a == b) continue;
      for (int c = 0; c < dim; ++c) {
        for (int f = 0; f < dim; ++f) {
          double s = dg[a](f, b, c) - dg[b](f, a, c);
          for (int d = 0; d < dim; ++d) {
            s += g(d, b, c) * g(f, a, d) - g(d, a, c) * g(f, b, d);
            s -= br[a][b][d] * g(f, d, c);
          }
          r(f, a, b, c) = s;
        }
      }
    }
  }
  return r;
}

Tensor4 curvature_at(const ManifoldSpec& spec, const Vec& p) {
  const FrameJet fj = frame_jet(spec, p);
  return curvature_from(fj, connection_jet_at(fj));
}

Tensor4 curvature_closed_form_at(const ManifoldSpec& spec, const Vec& p) {
  const ChartSpec& c = spec.chart();
  const int n = c.n, k = c.k, dim = c.dim();
  const FrameJet fj = frame_jet(spec, p);
  Tensor4 r(dim);
  for (int alpha = 1; alpha <= k; ++alpha) {
    for (int i = 1; i <= n; ++i) {
      const int a = y_index(c, alpha, i);
      for (int j = 1; j <= n; ++j) {
        const int b = x_index(c, j);
        // R(Y_{alpha i}, X_j) Y_{beta h}
        for (int beta = 1; beta <= k; ++beta) {
          for (int h = 1; h <= n; ++h) {
            const int e = y_index(c, beta, h);
            for (int gam = 1; gam <= k; ++gam) {
              for (int l = 1; l <= n; ++l) {
                const double v = fj.t_at(j, gam, l).hess(a, e);
                r(y_index(c, gam, l), a, b, e) = v;
                r(y_index(c, gam, l), b, a, e) = -v;
              }
            }
          }
        }
        // R(Y_{alpha i}, X_j) X_m
        for (int m = 1; m <= n; ++m) {
          const int e = x_index(c, m);
          for (int l = 1; l <= n; ++l) {
            const double v = -fj.t_at(j, alpha, m).hess(a, y_index(c, alpha, l));
            r(x_index(c, l), a, b, e) = v;
            r(x_index(c, l), b, a, e) = -v;
          }
        }
      }
    }
  }
  return r;
}

double nabla_omega_residual(const ManifoldSpec& spec, const Vec& p) {
  const int dim = spec.dim();
  const FrameJet fj = frame_jet(spec, p);
  const ConnCoeffs g = connection_jet_at(fj).gamma;
  double worst = 0.0;
  for (int alpha = 1; alpha <= spec.chart().k; ++alpha) {
    const FormOnFrame w = form_on_frame(spec.omega(alpha), fj);
    for (int a = 0; a < dim; ++a) {
      const Mat ga = contract_direction(g, Vec::Unit(dim, a));  // ga(d, b) = Gamma(d, a, b)
      const Mat r = w.derivs[a] - ga.transpose() * w.values - w.values * ga;
      worst = std::max(worst, r.cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

Mat contract_direction(const ConnCoeffs& g, const Vec& w) {
  const int dim = g.dim();
  Mat m = Mat::Zero(dim, dim);
  for (int a = 0; a < dim; ++a) {
    if (w[a] == 0.0) continue;
    for (int c = 0; c < dim; ++c) {
      for (int b = 0; b < dim; ++b) m(c, b) += w[a] * g(c, a, b);
    }
  }
  return m;
}

// ---------------------------------------------------------------------------

Curve::Curve(std::vector<double> times, std::vector<Vec> points, std::vector<Vec> velocities)
    : times_(std::move(times)), points_(std::move(points)), velocities_(std::move(velocities)) {
  if (times_.size() < 2 || points_.size() != times_.size() ||
      velocities_.size() != times_.size()) {
    throw DimensionMismatch("curve needs at least two samples with matching velocities");
  }
  for (std::size_t i = 0; i < times_.size(); ++i) {
    if (points_[i].size() != points_[0].size() || velocities_[i].size() != points_[0].size()) {
      throw DimensionMismatch("curve samples differ in dimension");
    }
    if (i > 0 && !(times_[i] > times_[i - 1])) throw Error("curve times must increase strictly");
  }
}

Curve Curve::from_samples(std::vector<double> times, std::vector<Vec> points) {
  const std::size_t n = times.size();
  if (n < 2 || points.size() != n) throw DimensionMismatch("curve needs at least two samples");
  std::vector<Vec> vel(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i == 0 ? 0 : i - 1;
    const std::size_t hi = i + 1 == n ? n - 1 : i + 1;
    vel[i] = (points[hi] - points[lo]) / (times[hi] - times[lo]);
  }
  return Curve(std::move(times), std::move(points), std::move(vel));
}

Curve Curve::line(const Vec& p0, const Vec& v, double T, int samples) {
  samples = std::max(samples, 2);
  std::vector<double> ts;
  std::vector<Vec> ps, vs;
  for (int i = 0; i < samples; ++i) {
    const double t = T * i / (samples - 1);
    ts.push_back(t);
    ps.push_back(p0 + t * v);
    vs.push_back(v);
  }
  return Curve(std::move(ts), std::move(ps), std::move(vs));
}

std::size_t Curve::segment(double t) const {
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  std::size_t i = it == times_.begin() ? 0 : static_cast<std::size_t>(it - times_.begin()) - 1;
  return std::min(i, times_.size() - 2);
}

Vec Curve::position(double t) const {
  const std::size_t i = segment(t);
  const double h = times_[i + 1] - times_[i];
  const double s = (t - times_[i]) / h;
  const double s2 = s * s, s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * points_[i] + (s3 - 2 * s2 + s) * h * velocities_[i] +
         (-2 * s3 + 3 * s2) * points_[i + 1] + (s3 - s2) * h * velocities_[i + 1];
}

Vec Curve::velocity(double t) const {
  const std::size_t i = segment(t);
  const double h = times_[i + 1] - times_[i];
  const double s = (t - times_[i]) / h;
  const double s2 = s * s;
  return ((6 * s2 - 6 * s) * points_[i] + (-6 * s2 + 6 * s) * points_[i + 1]) / h +
         (3 * s2 - 4 * s + 1) * velocities_[i] + (3 * s2 - 2 * s) * velocities_[i + 1];
}

// ---------------------------------------------------------------------------

namespace {

/// d U / dt = -Gamma(w) U in frame components along the curve.
Mat transport_rhs(const ManifoldSpec& spec, const Curve& curve, double t, const Mat& u) {
  const FrameJet fj = frame_jet(spec, curve.position(t));
  const Vec w = fj.inverse * curve.velocity(t);
  return -contract_direction(connection_jet_at(fj).gamma, w) * u;
}

template <class Visit>
Mat transport_frame_components(const ManifoldSpec& spec, const Curve& curve, const Mat& m0,
                               int steps, Visit visit) {
  if (steps < 1) throw Error("step count must be positive");
  if (m0.rows() != spec.dim() || curve.dim() != spec.dim()) {
    throw DimensionMismatch("transported vectors do not match the chart");
  }
  Mat frame, inverse;
  frame_and_inverse(spec, curve.start(), frame, inverse);
  Mat u = inverse * m0;
  const double h = (curve.t1() - curve.t0()) / steps;
  for (int s = 0; s < steps; ++s) {
    const double t = curve.t0() + s * h;
    const Mat k1 = transport_rhs(spec, curve, t, u);
    const Mat k2 = transport_rhs(spec, curve, t + h / 2, u + h / 2 * k1);
    const Mat k3 = transport_rhs(spec, curve, t + h / 2, u + h / 2 * k2);
    const Mat k4 = transport_rhs(spec, curve, t + h, u + h * k3);
    u += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    visit(t + h, u);
  }
  frame_and_inverse(spec, curve.end(), frame, inverse);
  return frame * u;
}

}  // namespace

Mat parallel_transport_frame(const ManifoldSpec& spec, const Curve& curve, const Mat& m0,
                             int steps) {
  return transport_frame_components(spec, curve, m0, steps, [](double, const Mat&) {});
}

Vec parallel_transport(const ManifoldSpec& spec, const Curve& curve, const Vec& v0, int steps) {
  return parallel_transport_frame(spec, curve, Mat(v0), steps).col(0);
}

std::vector<Vec> parallel_transport_path(const ManifoldSpec& spec, const Curve& curve,
                                         const Vec& v0, int steps) {
  std::vector<Vec> out{v0};
  transport_frame_components(spec, curve, Mat(v0), steps, [&](double t, const Mat& u) {
    Mat frame, inverse;
    frame_and_inverse(spec, curve.position(t), frame, inverse);
    out.push_back(frame * u.col(0));
  });
  return out;
}

Curve geodesic(const ManifoldSpec& spec, const Vec& p0, const Vec& v0, double T, int steps) {
  const int dim = spec.dim();
  check_point(spec.chart(), p0);
  if (v0.size() != dim) throw DimensionMismatch("initial velocity does not match the chart");
  if (steps < 1) throw Error("step count must be positive");

  // state: position (coordinates) and velocity (frame components)
  auto rhs = [&](const Vec& x) {
    const Vec p = x.head(dim), w = x.tail(dim);
    const FrameJet fj = frame_jet(spec, p);
    Vec out(2 * dim);
    out.head(dim) = fj.frame * w;
    out.tail(dim) = -contract_direction(connection_jet_at(fj).gamma, w) * w;
    return out;
  };

  Mat frame, inverse;
  frame_and_inverse(spec, p0, frame, inverse);
  Vec x(2 * dim);
  x << p0, inverse * v0;

  std::vector<double> ts{0.0};
  std::vector<Vec> ps{p0}, vs{v0};
  const double h = T / steps;
  for (int s = 1; s <= steps; ++s) {
    const Vec k1 = rhs(x);
    const Vec k2 = rhs(x + h / 2 * k1);
    const Vec k3 = rhs(x + h / 2 * k2);
    const Vec k4 = rhs(x + h * k3);
    x += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    const Vec p = x.head(dim);
    if (!p.allFinite() || p.cwiseAbs().maxCoeff() > 1e6) {
      throw IncompleteLeaf("geodesic leaves the chart before time " + std::to_string(T) +
                           " (step " + std::to_string(s) + ")");
    }
    frame_and_inverse(spec, p, frame, inverse);
    ts.push_back(s * h);
    ps.push_back(p);
    vs.push_back(frame * x.tail(dim));
  }
  return Curve(std::move(ts), std::move(ps), std::move(vs));
}

}  // namespace ksym
