#include "ksym/kaehler.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "ksym/connection.hpp"
#include "ksym/errors.hpp"
#include "ksym/structures.hpp"

namespace ksym {

namespace {

constexpr double kFdStep = 1e-5;

double max_abs(const Mat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

/// Frame indices of the local frame (Y_{alpha,1..n}, X_1..X_n).
std::vector<int> local_indices(const ChartSpec& c, int alpha) {
  std::vector<int> idx;
  for (int i = 1; i <= c.n; ++i) idx.push_back(y_index(c, alpha, i));
  for (int i = 1; i <= c.n; ++i) idx.push_back(x_index(c, i));
  return idx;
}

}  // namespace

Mat metric_at(const ManifoldSpec& spec, const Vec& p) {
  check_point(spec.chart(), p);
  const int dim = spec.dim();
  switch (spec.metric().kind) {
    case MetricKind::CoordinateIdentity:
      return Mat::Identity(dim, dim);
    case MetricKind::AdaptedIdentity: {
      Mat frame, inverse;
      frame_and_inverse(spec, p, frame, inverse);
      return inverse.transpose() * inverse;
    }
    case MetricKind::Field: {
      Mat g(dim, dim);
      for (int r = 0; r < dim; ++r) {
        for (int c = 0; c < dim; ++c) {
          g(r, c) = eval_value(spec.metric().entries[static_cast<std::size_t>(r * dim + c)], p);
        }
      }
      return g;
    }
  }
  return Mat::Identity(dim, dim);
}

StructureOperator structure_operator(const ManifoldSpec& spec, int alpha, const Vec& p) {
  const ChartSpec& c = spec.chart();
  if (alpha < 1 || alpha > c.k) throw IndexOutOfRange("form index out of range");
  const int n = c.n, dim = c.dim();
  Mat frame, inverse;
  frame_and_inverse(spec, p, frame, inverse);
  const Mat g = metric_at(spec, p);
  if (max_abs(g - g.transpose()) > 1e-12 * std::max(1.0, max_abs(g))) {
    throw SingularMetric("metric is not symmetric at the point");
  }

  const Mat gram = frame.transpose() * g * frame;
  for (int a = 0; a < dim; ++a) {
    for (int b = a + 1; b < dim; ++b) {
      if (frame_block(c, a) == frame_block(c, b)) continue;
      if (std::abs(gram(a, b)) > 1e-9) {
        throw OrthogonalityError("g(e_" + std::to_string(a) + ", e_" + std::to_string(b) +
                                 ") = " + std::to_string(gram(a, b)) +
                                 " couples different distributions");
      }
    }
  }

  StructureOperator out;
  out.alpha = alpha;
  const std::vector<int> idx = local_indices(c, alpha);
  out.basis.resize(dim, 2 * n);
  for (int l = 0; l < 2 * n; ++l) out.basis.col(l) = frame.col(idx[static_cast<std::size_t>(l)]);
  out.G = out.basis.transpose() * g * out.basis;
  out.W = out.basis.transpose() * spec.omega(alpha).matrix_at(p) * out.basis;
  Eigen::LLT<Mat> llt(out.G);
  if (llt.info() != Eigen::Success) {
    throw SingularMetric("metric restricted to L_" + std::to_string(alpha) +
                         " + Q is not positive definite");
  }
  out.A = llt.solve(out.W);
  return out;
}

Mat sqrt_spd(const Mat& m) {
  if (m.rows() != m.cols()) throw DimensionMismatch("sqrt_spd needs a square matrix");
  const double scale = std::max(max_abs(m), 1e-300);
  if (max_abs(m - m.transpose()) > 1e-12 * scale) throw NotSPD("matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.transpose()));
  if (es.info() != Eigen::Success) throw NotSPD("eigendecomposition failed");
  const Vec& lambda = es.eigenvalues();
  if (lambda.size() == 0 || !(lambda[0] > 1e-14 * scale)) {
    throw NotSPD("smallest eigenvalue " + std::to_string(lambda.size() ? lambda[0] : 0.0) +
                 " is not positive");
  }
  const Mat& v = es.eigenvectors();
  const Mat r = v * lambda.cwiseSqrt().asDiagonal() * v.transpose();
  return 0.5 * (r + r.transpose());
}

AlmostComplex almost_complex(const ManifoldSpec& spec, int alpha, const Vec& p) {
  const StructureOperator so = structure_operator(spec, alpha, p);
  const int m = static_cast<int>(so.G.rows());
  const int n = m / 2;

  // orthonormal coordinates for G: A becomes skew, A* its transpose
  const Eigen::LLT<Mat> llt(so.G);
  const Mat L = llt.matrixL();
  const Mat Linv = L.triangularView<Eigen::Lower>().solve(Mat::Identity(m, m));
  const Mat At = L.transpose() * so.A * Linv.transpose();
  const Mat St = sqrt_spd(At * At.transpose());
  const Mat Jt = St.llt().solve(At);

  AlmostComplex out;
  out.alpha = alpha;
  out.basis = so.basis;
  out.W = so.W;
  out.J = Linv.transpose() * Jt * L.transpose();
  out.ghat = out.J.transpose() * so.W;

  const Mat I = Mat::Identity(m, m);
  out.j_squared = max_abs(out.J * out.J + I);
  out.block_swap = std::max(max_abs(out.J.topLeftCorner(n, n)), max_abs(out.J.bottomRightCorner(n, n)));
  out.compatibility = max_abs(so.W - out.ghat * out.J);
  out.invariance = max_abs(out.J.transpose() * out.ghat * out.J - out.ghat);
  const double asym = max_abs(out.ghat - out.ghat.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (out.ghat + out.ghat.transpose()));
  out.ghat_min_eigenvalue = es.eigenvalues()[0];

  auto fail = [&](const std::string& what, double r) {
    throw PropertyViolation(what + " fails for alpha = " + std::to_string(alpha) +
                            " (residual " + std::to_string(r) + ")");
  };
  constexpr double tol = 1e-10;
  if (out.j_squared > tol) fail("J^2 = -I", out.j_squared);
  if (out.block_swap > tol) fail("J L = Q, J Q = L", out.block_swap);
  if (asym > tol) fail("ghat symmetric", asym);
  if (!(out.ghat_min_eigenvalue > 0.0)) fail("ghat positive definite", out.ghat_min_eigenvalue);
  if (out.compatibility > tol) fail("omega(u,v) = ghat(u,Jv)", out.compatibility);
  if (out.invariance > tol) fail("ghat(Ju,Jv) = ghat(u,v)", out.invariance);
  return out;
}

Mat j_field_at(const ManifoldSpec& spec, int alpha, const Vec& p) {
  const ChartSpec& c = spec.chart();
  const int dim = c.dim();
  const AlmostComplex ac = almost_complex(spec, alpha, p);
  const std::vector<int> idx = local_indices(c, alpha);
  Mat e = Mat::Zero(dim, dim);
  for (std::size_t r = 0; r < idx.size(); ++r) {
    for (std::size_t s = 0; s < idx.size(); ++s) {
      e(idx[r], idx[s]) = ac.J(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(s));
    }
  }
  Mat frame, inverse;
  frame_and_inverse(spec, p, frame, inverse);
  return frame * e * inverse;
}

namespace {

using Field = std::function<Vec(const Vec&)>;

/// Coordinate Jacobian of a vector field by central differences.
Mat fd_jacobian(const Field& f, const Vec& p) {
  const int dim = static_cast<int>(p.size());
  Mat jac(dim, dim);
  for (int m = 0; m < dim; ++m) {
    Vec lo = p, hi = p;
    lo[m] -= kFdStep;
    hi[m] += kFdStep;
    jac.col(m) = (f(hi) - f(lo)) / (2 * kFdStep);
  }
  return jac;
}

}  // namespace

Vec nijenhuis_at(const ManifoldSpec& spec, int alpha, const Vec& p, int a, int b,
                 BracketMode mode) {
  const int dim = spec.dim();
  if (a < 0 || a >= dim || b < 0 || b >= dim) throw IndexOutOfRange("frame index out of range");
  const FrameJet fj = frame_jet(spec, p);

  auto frame_field = [&](int e) -> Field {
    return [&spec, e](const Vec& q) {
      Mat f, inv;
      frame_and_inverse(spec, q, f, inv);
      return Vec(f.col(e));
    };
  };
  auto j_image = [&](int e) -> Field {
    return [&spec, alpha, e](const Vec& q) {
      Mat f, inv;
      frame_and_inverse(spec, q, f, inv);
      return Vec(j_field_at(spec, alpha, q) * f.col(e));
    };
  };

  auto jacobian_of_frame = [&](int e) -> Mat {
    if (mode == BracketMode::FrameExact) return fj.jacobian[static_cast<std::size_t>(e)];
    return fd_jacobian(frame_field(e), p);
  };

  const Mat J = j_field_at(spec, alpha, p);
  const Vec u = fj.frame.col(a), v = fj.frame.col(b);
  const Vec ju = J * u, jv = J * v;
  const Mat du = jacobian_of_frame(a), dv = jacobian_of_frame(b);
  const Mat dju = fd_jacobian(j_image(a), p), djv = fd_jacobian(j_image(b), p);

  // [U, V] = DV U - DU V
  const Vec uv = dv * u - du * v;
  const Vec jujv = djv * ju - dju * jv;
  const Vec juv = dv * ju - dju * v;
  const Vec ujv = djv * u - du * jv;
  return J * (J * uv) + jujv - J * juv - J * ujv;
}

Mat assembled_metric_at(const ManifoldSpec& spec, const Vec& p) {
  const ChartSpec& c = spec.chart();
  const int n = c.n, dim = c.dim();
  Mat frame_metric = Mat::Zero(dim, dim);
  for (int alpha = 1; alpha <= c.k; ++alpha) {
    const AlmostComplex ac = almost_complex(spec, alpha, p);
    const std::vector<int> idx = local_indices(c, alpha);
    for (int r = 0; r < n; ++r) {
      for (int s = 0; s < n; ++s) frame_metric(idx[r], idx[s]) = ac.ghat(r, s);
    }
    if (alpha == 1) {
      for (int r = n; r < 2 * n; ++r) {
        for (int s = n; s < 2 * n; ++s) frame_metric(idx[r], idx[s]) = ac.ghat(r, s);
      }
    }
  }
  Mat frame, inverse;
  frame_and_inverse(spec, p, frame, inverse);
  const Mat g = inverse.transpose() * frame_metric * inverse;
  return 0.5 * (g + g.transpose());
}

double levi_civita_comparison(const ManifoldSpec& spec, const Vec& p) {
  const int dim = spec.dim();
  const FrameJet fj = frame_jet(spec, p);
  const ConnCoeffs gamma = connection_jet_at(fj).gamma;

  const Mat g = assembled_metric_at(spec, p);
  std::vector<Mat> dg(static_cast<std::size_t>(dim));
  for (int m = 0; m < dim; ++m) {
    Vec lo = p, hi = p;
    lo[m] -= kFdStep;
    hi[m] += kFdStep;
    dg[static_cast<std::size_t>(m)] =
        (assembled_metric_at(spec, hi) - assembled_metric_at(spec, lo)) / (2 * kFdStep);
  }
  const Mat ginv = g.inverse();

  // coordinate Christoffel symbols: chr[i](k, j) = Gamma^k_{ij}
  std::vector<Mat> chr(static_cast<std::size_t>(dim), Mat::Zero(dim, dim));
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      Vec low(dim);
      for (int l = 0; l < dim; ++l) low[l] = 0.5 * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
      chr[static_cast<std::size_t>(i)].col(j) = ginv * low;
    }
  }

  double worst = 0.0;
  for (int a = 0; a < dim; ++a) {
    for (int b = 0; b < dim; ++b) {
      Vec cov = fj.jacobian[static_cast<std::size_t>(b)] * fj.frame.col(a);
      for (int i = 0; i < dim; ++i) {
        if (fj.frame(i, a) == 0.0) continue;
        cov += fj.frame(i, a) * chr[static_cast<std::size_t>(i)] * fj.frame.col(b);
      }
      const Vec lc = fj.inverse * cov;
      for (int e = 0; e < dim; ++e) worst = std::max(worst, std::abs(lc[e] - gamma(e, a, b)));
    }
  }
  return worst;
}

}  // namespace ksym
