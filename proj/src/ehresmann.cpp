#include "ksym/ehresmann.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "ksym/errors.hpp"
#include "ksym/parallel.hpp"

namespace ksym {

namespace {

/// RK4 for p' = F(p)[:, X] c(s) on [s0, s1].
Curve integrate_horizontal(const ManifoldSpec& spec, const Vec& p0,
                           const std::function<Vec(double)>& coeffs, double s0, double s1,
                           int steps) {
  check_point(spec.chart(), p0);
  if (steps < 1) throw Error("step count must be positive");
  const int n = spec.chart().n;
  auto rhs = [&](double s, const Vec& p) {
    Mat frame, inverse;
    frame_and_inverse(spec, p, frame, inverse);
    return Vec(frame.leftCols(n) * coeffs(s));
  };
  std::vector<double> ts{s0};
  std::vector<Vec> ps{p0}, vs{rhs(s0, p0)};
  Vec p = p0;
  const double h = (s1 - s0) / steps;
  for (int i = 0; i < steps; ++i) {
    const double s = s0 + i * h;
    const Vec k1 = rhs(s, p);
    const Vec k2 = rhs(s + h / 2, p + h / 2 * k1);
    const Vec k3 = rhs(s + h / 2, p + h / 2 * k2);
    const Vec k4 = rhs(s + h, p + h * k3);
    p += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    if (!p.allFinite() || p.cwiseAbs().maxCoeff() > 1e6) {
      throw IncompleteLeaf("horizontal curve leaves the chart");
    }
    ts.push_back(s + h);
    ps.push_back(p);
    vs.push_back(rhs(s + h, p));
  }
  return Curve(std::move(ts), std::move(ps), std::move(vs));
}

/// Sample times of c plus the midpoints between them.
std::vector<double> probe_times(const Curve& c) {
  std::vector<double> out;
  const auto& ts = c.times();
  for (std::size_t i = 0; i < ts.size(); ++i) {
    out.push_back(ts[i]);
    if (i + 1 < ts.size()) out.push_back(0.5 * (ts[i] + ts[i + 1]));
  }
  return out;
}

std::vector<double> grid(double t0, double t1, int count) {
  std::vector<double> out;
  for (int i = 0; i < count; ++i) out.push_back(t0 + (t1 - t0) * i / (count - 1));
  return out;
}

}  // namespace

Curve horizontal_integral_curve(const ManifoldSpec& spec, const Vec& p0, const Vec& direction,
                                double T, int steps) {
  if (direction.size() != spec.chart().n) throw DimensionMismatch("direction needs n entries");
  if (direction.cwiseAbs().maxCoeff() == 0.0) throw Error("direction must be nonzero");
  return integrate_horizontal(spec, p0, [&](double) { return direction; }, 0.0, T, steps);
}

Curve horizontal_lift(const ManifoldSpec& spec, const Vec& p0, const Curve& guide, int steps) {
  const int n = spec.chart().n;
  return integrate_horizontal(
      spec, p0, [&](double s) { return Vec(guide.velocity(s).head(n)); }, guide.t0(), guide.t1(),
      steps);
}

double geodesic_residual(const ManifoldSpec& spec, const Curve& c) {
  constexpr double h = 1e-5;
  auto frame_velocity = [&](double t) {
    Mat frame, inverse;
    frame_and_inverse(spec, c.position(t), frame, inverse);
    return Vec(inverse * c.velocity(t));
  };
  double worst = 0.0;
  for (double t : probe_times(c)) {
    if (t - h < c.t0() || t + h > c.t1()) continue;
    const Vec w = frame_velocity(t);
    const Vec dw = (frame_velocity(t + h) - frame_velocity(t - h)) / (2 * h);
    const Vec r = dw + contract_direction(connection_coeffs_at(spec, c.position(t)), w) * w;
    worst = std::max(worst, r.cwiseAbs().maxCoeff());
  }
  return worst;
}

Rectangle build_rectangle(const ManifoldSpec& spec, const Curve& alpha, const Curve& beta,
                          const RectangleOptions& opt) {
  const ChartSpec& c = spec.chart();
  const int n = c.n;
  if (alpha.dim() != c.dim() || beta.dim() != c.dim()) {
    throw DimensionMismatch("curves do not match the chart");
  }
  if (opt.nt < 2 || opt.ns < 2 || opt.substeps < 1) throw Error("grid needs at least 2x2 nodes");
  if ((alpha.start() - beta.start()).cwiseAbs().maxCoeff() > 1e-9) {
    throw Error("vertical and horizontal curves must share their origin");
  }

  for (double t : probe_times(alpha)) {
    const double r = alpha.velocity(t).head(n).cwiseAbs().maxCoeff();
    if (r > 1e-6) {
      throw NotVertical("alpha has horizontal velocity component " + std::to_string(r) +
                        " at t = " + std::to_string(t));
    }
  }
  for (double s : probe_times(beta)) {
    Mat frame, inverse;
    frame_and_inverse(spec, beta.position(s), frame, inverse);
    const Vec w = inverse * beta.velocity(s);
    const double r = w.tail(c.dim() - n).cwiseAbs().maxCoeff();
    if (r > 1e-6) {
      throw NotHorizontal("beta has vertical frame component " + std::to_string(r) +
                          " at s = " + std::to_string(s));
    }
  }
  const double geo = geodesic_residual(spec, alpha);
  if (geo > 1e-6) throw NotGeodesic("alpha geodesic residual " + std::to_string(geo));

  Rectangle rect{alpha, beta, grid(alpha.t0(), alpha.t1(), opt.nt),
                 grid(beta.t0(), beta.t1(), opt.ns), {}, {}, 0.0};

  const Vec v0 = alpha.velocity(alpha.t0());
  const std::vector<Vec> path =
      parallel_transport_path(spec, beta, v0, (opt.ns - 1) * opt.substeps);
  for (int j = 0; j < opt.ns; ++j) {
    const Vec& v = path[static_cast<std::size_t>(j * opt.substeps)];
    rect.transported.push_back(v);
    rect.tangency = std::max(rect.tangency, v.head(n).cwiseAbs().maxCoeff());
  }

  const double a = alpha.t1() - alpha.t0();
  rect.sigma.assign(static_cast<std::size_t>(opt.ns), {});
  parallel_for(opt.ns, worker_count(opt.threads), [&](int j) {
    const Vec base = j == 0 ? beta.start() : beta.position(rect.s[static_cast<std::size_t>(j)]);
    const Curve g = geodesic(spec, base, rect.transported[static_cast<std::size_t>(j)], a,
                             (opt.nt - 1) * opt.substeps);
    auto& row = rect.sigma[static_cast<std::size_t>(j)];
    for (int i = 0; i < opt.nt; ++i) row.push_back(g.points()[static_cast<std::size_t>(i * opt.substeps)]);
  });
  return rect;
}

std::vector<Rectangle> build_rectangle_chain(const ManifoldSpec& spec, const Curve& alpha,
                                             const Curve& beta, const std::vector<double>& knots,
                                             const RectangleOptions& opt) {
  std::vector<double> cuts{alpha.t0()};
  for (double k : knots) {
    if (!(k > cuts.back() && k < alpha.t1())) throw Error("knots must increase inside alpha's domain");
    cuts.push_back(k);
  }
  cuts.push_back(alpha.t1());

  std::vector<Rectangle> out;
  Curve edge = beta;
  for (std::size_t q = 0; q + 1 < cuts.size(); ++q) {
    std::vector<double> ts;
    std::vector<Vec> ps, vs;
    for (double t : grid(cuts[q], cuts[q + 1], std::max(opt.nt, 2))) {
      ts.push_back(t);
      ps.push_back(alpha.position(t));
      vs.push_back(alpha.velocity(t));
    }
    const Curve piece(std::move(ts), std::move(ps), std::move(vs));
    if (q > 0) edge = horizontal_lift(spec, piece.start(), beta, (opt.ns - 1) * opt.substeps);
    out.push_back(build_rectangle(spec, piece, edge, opt));
  }
  return out;
}

double verify_rectangle(const Rectangle& rect, const ManifoldSpec& spec) {
  const int n = spec.chart().n;
  const std::size_t ns = rect.s.size(), nt = rect.t.size();
  if (rect.sigma.size() != ns) throw DimensionMismatch("rectangle grid is incomplete");
  double worst = 0.0;
  for (std::size_t j = 0; j < ns; ++j) {
    if (rect.sigma[j].size() != nt) throw DimensionMismatch("rectangle grid is incomplete");
  }
  for (std::size_t j = 0; j < ns; ++j) {
    for (std::size_t i = 0; i + 1 < nt; ++i) {
      const Vec d = (rect.sigma[j][i + 1] - rect.sigma[j][i]) / (rect.t[i + 1] - rect.t[i]);
      worst = std::max(worst, d.head(n).cwiseAbs().maxCoeff());
    }
  }
  for (std::size_t i = 0; i < nt; ++i) {
    for (std::size_t j = 0; j + 1 < ns; ++j) {
      const Vec d = (rect.sigma[j + 1][i] - rect.sigma[j][i]) / (rect.s[j + 1] - rect.s[j]);
      Mat frame, inverse;
      frame_and_inverse(spec, 0.5 * (rect.sigma[j + 1][i] + rect.sigma[j][i]), frame, inverse);
      const Vec w = inverse * d;
      worst = std::max(worst, w.tail(w.size() - n).cwiseAbs().maxCoeff());
    }
  }
  for (std::size_t i = 0; i < nt; ++i) {
    worst = std::max(worst, (rect.sigma[0][i] - rect.alpha.position(rect.t[i])).cwiseAbs().maxCoeff());
  }
  for (std::size_t j = 0; j < ns; ++j) {
    worst = std::max(worst, (rect.sigma[j][0] - rect.beta.position(rect.s[j])).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace ksym
