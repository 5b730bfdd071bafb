#include "ksym/structures.hpp"

#include <array>
#include <cmath>
#include <random>
#include <sstream>

#include "ksym/errors.hpp"
#include "ksym/parallel.hpp"

namespace ksym {

TwoFormField standard_omega(const ChartSpec& chart, int alpha) {
  if (alpha < 1 || alpha > chart.k) {
    throw IndexOutOfRange("form index " + std::to_string(alpha) + " outside 1.." +
                          std::to_string(chart.k));
  }
  TwoFormField w(chart);
  for (int i = 1; i <= chart.n; ++i) w.set_constant(x_index(chart, i), y_index(chart, alpha, i), 0.5);
  return w;
}

double eval_two_form(const TwoFormField& omega, const Vec& p, const Vec& u, const Vec& v) {
  const int dim = omega.chart().dim();
  if (p.size() != dim || u.size() != dim || v.size() != dim) {
    throw DimensionMismatch("two-form arguments do not match the chart");
  }
  double s = 0.0;
  for (const auto& [slot, f] : omega.entries()) {
    const auto [l, m] = slot;
    s += eval_value(f, p) * (u[l] * v[m] - u[m] * v[l]);
  }
  return s;
}

FormOnFrame form_on_frame(const TwoFormField& omega, const FrameJet& fj) {
  const int dim = fj.chart.dim();
  const TwoFormField::Jet w = omega.jet_at(fj.point);
  FormOnFrame out;
  out.values = fj.frame.transpose() * w.value * fj.frame;
  out.derivs.reserve(static_cast<std::size_t>(dim));
  for (int a = 0; a < dim; ++a) {
    Mat dw = Mat::Zero(dim, dim);
    for (int m = 0; m < dim; ++m) dw += fj.frame(m, a) * w.partials[static_cast<std::size_t>(m)];
    // column b: derivative of the frame field e_b along e_a
    Mat de(dim, dim);
    for (int b = 0; b < dim; ++b) de.col(b) = fj.jacobian[static_cast<std::size_t>(b)] * fj.frame.col(a);
    out.derivs.push_back(fj.frame.transpose() * dw * fj.frame + de.transpose() * w.value * fj.frame +
                         fj.frame.transpose() * w.value * de);
  }
  return out;
}

const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::Skipped: return "skipped";
  }
  return "?";
}

bool ValidationReport::all_passed() const {
  for (const auto& c : checks) {
    if (c.status == CheckStatus::Fail) return false;
  }
  return true;
}

const CheckRecord& ValidationReport::find(const std::string& id) const {
  for (const auto& c : checks) {
    if (c.id == id) return c;
  }
  throw Error("no check with id " + id);
}

std::vector<Vec> SamplingPlan::points(const ChartSpec& chart) const {
  const int dim = chart.dim();
  const Box b = box && box->dim() == dim ? *box : Box::cube(dim, -1.0, 1.0);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Vec> out;
  out.reserve(static_cast<std::size_t>(std::max(sample_count, 0)));
  for (int s = 0; s < sample_count; ++s) {
    Vec p(dim);
    for (int m = 0; m < dim; ++m) p[m] = b.lo[m] + (b.hi[m] - b.lo[m]) * unit(rng);
    out.push_back(std::move(p));
  }
  return out;
}

namespace {

constexpr int kCheckCount = 7;

struct CheckDef {
  const char* id;
  const char* description;
};

constexpr std::array<CheckDef, kCheckCount> kChecks{{
    {"C1", "closedness: d(omega_alpha) = 0"},
    {"C2", "characteristic spaces of the omega_alpha intersect trivially"},
    {"C3", "isotropy: omega_alpha vanishes on LxL and on QxQ"},
    {"C4", "[Y, X] lies in L_alpha + Q for Y in L_alpha, X in Q"},
    {"C5", "t-compatibility: dt_i^{aj}/dy_{(b-1)n+h} = 0 for a != b, y-slopes independent of alpha"},
    {"C6", "integrability of Q: [X_i, X_j] has no vertical component"},
    {"C7", "Lie derivative of omega_alpha along L_beta vanishes for alpha != beta"},
}};

struct SampleResult {
  std::array<double, kCheckCount> residual{};
  std::array<std::string, kCheckCount> note;
};

std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void record(SampleResult& r, int check, double value, const std::string& note) {
  if (std::abs(value) > r.residual[check]) {
    r.residual[check] = std::abs(value);
    r.note[check] = note;
  }
}

SampleResult check_point_all(const ManifoldSpec& spec, const Vec& p) {
  const ChartSpec& c = spec.chart();
  const int n = c.n, k = c.k, dim = c.dim();
  SampleResult r;
  const FrameJet fj = frame_jet(spec, p);

  std::vector<TwoFormField> omegas;
  for (int alpha = 1; alpha <= k; ++alpha) omegas.push_back(spec.omega(alpha));

  // C1
  for (int alpha = 1; alpha <= k; ++alpha) {
    if (spec.forms().empty()) break;  // constant coefficients
    const auto w = omegas[static_cast<std::size_t>(alpha - 1)].jet_at(p);
    for (int l = 0; l < dim; ++l) {
      for (int m = l + 1; m < dim; ++m) {
        for (int q = m + 1; q < dim; ++q) {
          const double d = w.partials[l](m, q) - w.partials[m](l, q) + w.partials[q](l, m);
          record(r, 0, d,
                 "d omega_" + std::to_string(alpha) + " component (" + std::to_string(l) + "," +
                     std::to_string(m) + "," + std::to_string(q) + ") = " + fmt_double(d));
        }
      }
    }
  }

  // C2
  {
    Mat stacked(k * dim, dim);
    for (int alpha = 0; alpha < k; ++alpha) {
      stacked.block(alpha * dim, 0, dim, dim) = omegas[static_cast<std::size_t>(alpha)].matrix_at(p);
    }
    Eigen::JacobiSVD<Mat> svd(stacked);
    const Vec& s = svd.singularValues();
    const double smax = s.size() ? s[0] : 0.0;
    const double smin = s.size() ? s[s.size() - 1] : 0.0;
    if (!(smin > 1e-10 * smax)) {
      record(r, 1, smax > 0 ? 1.0 - smin / smax : 1.0,
             "joint kernel is nontrivial: smallest singular value " + fmt_double(smin) +
                 ", largest " + fmt_double(smax));
    }
  }

  std::vector<FormOnFrame> on_frame;
  for (const auto& w : omegas) on_frame.push_back(form_on_frame(w, fj));

  // C3
  for (int alpha = 1; alpha <= k; ++alpha) {
    const Mat& v = on_frame[static_cast<std::size_t>(alpha - 1)].values;
    for (int a = 0; a < dim; ++a) {
      for (int b = a + 1; b < dim; ++b) {
        const bool both_q = frame_block(c, a) == 0 && frame_block(c, b) == 0;
        const bool both_l = frame_block(c, a) != 0 && frame_block(c, b) != 0;
        if (!both_q && !both_l) continue;
        record(r, 2, v(a, b),
               "omega_" + std::to_string(alpha) + "(e_" + std::to_string(a) + ", e_" +
                   std::to_string(b) + ") = " + fmt_double(v(a, b)));
      }
    }
  }

  // C4 and C6 share the frame brackets
  for (int alpha = 1; alpha <= k; ++alpha) {
    for (int i = 1; i <= n; ++i) {
      for (int j = 1; j <= n; ++j) {
        const Vec br = fj.bracket(y_index(c, alpha, i), x_index(c, j));
        for (int e = 0; e < dim; ++e) {
          const int blk = frame_block(c, e);
          if (blk == 0 || blk == alpha) continue;
          record(r, 3, br[e],
                 "[Y_" + std::to_string(alpha) + std::to_string(i) + ", X_" + std::to_string(j) +
                     "] has component " + fmt_double(br[e]) + " on frame vector " +
                     std::to_string(e));
        }
      }
    }
  }
  for (int i = 1; i <= n; ++i) {
    for (int j = i + 1; j <= n; ++j) {
      const Vec br = fj.bracket(x_index(c, i), x_index(c, j));
      for (int e = n; e < dim; ++e) {
        record(r, 5, br[e],
               "[X_" + std::to_string(i) + ", X_" + std::to_string(j) + "] has vertical component " +
                   fmt_double(br[e]) + " on frame vector " + std::to_string(e));
      }
    }
  }

  // C5
  for (int i = 1; i <= n; ++i) {
    for (int alpha = 1; alpha <= k; ++alpha) {
      for (int j = 1; j <= n; ++j) {
        for (int beta = 1; beta <= k; ++beta) {
          for (int h = 1; h <= n; ++h) {
            const double d = fj.dt_dy(i, alpha, j, beta, h);
            const std::string name = "d t_" + std::to_string(i) + "^{" + std::to_string(alpha) +
                                     "," + std::to_string(j) + "} / d y" +
                                     std::to_string(y_index(c, beta, h) - n + 1);
            if (beta != alpha) {
              record(r, 4, d, name + " = " + fmt_double(d) + " != 0");
            } else if (alpha > 1) {
              const double ref = fj.dt_dy(i, 1, j, 1, h);
              record(r, 4, d - ref,
                     name + " = " + fmt_double(d) + " differs from the alpha=1 slope " +
                         fmt_double(ref));
            }
          }
        }
      }
    }
  }

  // C7: (L_X omega_alpha)(e_b, e_c) for X = Y_{beta,i}, beta != alpha
  for (int alpha = 1; alpha <= k; ++alpha) {
    const FormOnFrame& w = on_frame[static_cast<std::size_t>(alpha - 1)];
    for (int beta = 1; beta <= k; ++beta) {
      if (beta == alpha) continue;
      for (int i = 1; i <= n; ++i) {
        const int a = y_index(c, beta, i);
        std::vector<Vec> br(static_cast<std::size_t>(dim));
        for (int b = 0; b < dim; ++b) br[static_cast<std::size_t>(b)] = fj.bracket(a, b);
        for (int b = 0; b < dim; ++b) {
          for (int e = b + 1; e < dim; ++e) {
            const double lie = w.derivs[a](b, e) - br[b].dot(w.values.col(e)) -
                               w.values.row(b).dot(br[e]);
            record(r, 6, lie,
                   "(L_{Y_" + std::to_string(beta) + std::to_string(i) + "} omega_" +
                       std::to_string(alpha) + ")(e_" + std::to_string(b) + ", e_" +
                       std::to_string(e) + ") = " + fmt_double(lie));
          }
        }
      }
    }
  }
  return r;
}

}  // namespace

ValidationReport validate_spec(const ManifoldSpec& spec, const SamplingPlan& plan) {
  const std::vector<Vec> pts = plan.points(spec.chart());
  std::vector<SampleResult> results(pts.size());
  parallel_for(static_cast<int>(pts.size()), worker_count(plan.threads), [&](int s) {
    results[static_cast<std::size_t>(s)] = check_point_all(spec, pts[static_cast<std::size_t>(s)]);
  });

  ValidationReport report;
  for (int id = 0; id < kCheckCount; ++id) {
    CheckRecord rec;
    rec.id = kChecks[id].id;
    rec.description = kChecks[id].description;
    for (std::size_t s = 0; s < results.size(); ++s) {
      const double v = results[s].residual[id];
      rec.max_residual = std::max(rec.max_residual, v);
      if (v > plan.tolerance && !rec.witness) {
        rec.witness = Witness{pts[s], {}, results[s].note[id]};
      }
    }
    rec.status = rec.witness ? CheckStatus::Fail : CheckStatus::Pass;
    report.checks.push_back(std::move(rec));
  }
  return report;
}

GroupMembership is_group_element(const Mat& m, int n, int k) {
  const int dim = n * (k + 1);
  if (n < 1 || k < 1 || m.rows() != dim || m.cols() != dim) {
    throw DimensionMismatch("expected a " + std::to_string(dim) + "x" + std::to_string(dim) +
                            " matrix");
  }
  constexpr double tol = 1e-10;
  auto block = [&](int r, int c) { return m.block(r * n, c * n, n, n); };
  auto fail = [](std::string why) { return GroupMembership{false, std::move(why)}; };

  const Mat t = block(0, 0);
  Eigen::FullPivLU<Mat> lu(t);
  lu.setThreshold(tol);
  if (!lu.isInvertible()) return fail("diagonal block T is singular");

  for (int r = 0; r < k; ++r) {
    for (int c = 0; c < k; ++c) {
      const Mat expect = r == c ? t : Mat::Zero(n, n);
      if ((block(r, c) - expect).cwiseAbs().maxCoeff() > tol) {
        return fail(r == c ? "diagonal block " + std::to_string(r + 1) + " differs from T"
                           : "block (" + std::to_string(r + 1) + "," + std::to_string(c + 1) +
                                 ") is nonzero");
      }
    }
    const Mat s = block(r, k);
    const Mat ts = t * s.transpose();
    if ((ts - ts.transpose()).cwiseAbs().maxCoeff() > tol) {
      return fail("T S_" + std::to_string(r + 1) + "^T is not symmetric");
    }
  }
  for (int c = 0; c < k; ++c) {
    if (block(k, c).cwiseAbs().maxCoeff() > tol) {
      return fail("lower-left block (" + std::to_string(k + 1) + "," + std::to_string(c + 1) +
                  ") is nonzero");
    }
  }
  const Mat tinv_t = lu.inverse().transpose();
  if ((block(k, k) - tinv_t).cwiseAbs().maxCoeff() > tol) {
    return fail("last diagonal block differs from transpose(T^-1)");
  }
  return GroupMembership{true, "ok"};
}

}  // namespace ksym
