#include "ksym/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ksym/charclass.hpp"
#include "ksym/connection.hpp"
#include "ksym/ehresmann.hpp"
#include "ksym/errors.hpp"
#include "ksym/kaehler.hpp"
#include "ksym/normalform.hpp"
#include "ksym/parallel.hpp"
#include "ksym/spec_io.hpp"

namespace ksym {

using ojson = nlohmann::ordered_json;

const std::vector<std::string>& cli_commands() {
  static const std::vector<std::string> cmds{"validate",  "connection", "curvature",
                                             "transport", "geodesic",   "rectangle",
                                             "normal-form", "kaehler",  "charclass", "all"};
  return cmds;
}

namespace {

struct Sample {
  double residual = 0.0;
  std::string note;
  bool error = false;
  bool skipped = false;
};

using SampleFn = std::function<Sample(const Vec&)>;

struct Context {
  const ManifoldSpec& spec;
  std::vector<Vec> points;
  int threads;
  std::optional<double> tol_override;
  ReportFile& report;

  double tol(double fallback) const { return tol_override.value_or(fallback); }

  std::vector<Vec> first(std::size_t count) const {
    return {points.begin(), points.begin() + static_cast<std::ptrdiff_t>(std::min(count, points.size()))};
  }

  /// Evaluates fn at every point; residuals reduce by max, witnesses come
  /// from the lowest failing index.
  void sampled(const std::string& id, const std::string& description, double tolerance,
               const std::vector<Vec>& pts, const SampleFn& fn) const {
    std::vector<Sample> res(pts.size());
    parallel_for(static_cast<int>(pts.size()), threads, [&](int i) {
      auto& r = res[static_cast<std::size_t>(i)];
      try {
        r = fn(pts[static_cast<std::size_t>(i)]);
      } catch (const std::exception& e) {
        r = Sample{0.0, e.what(), true, false};
      }
    });
    CheckRecord rec;
    rec.id = id;
    rec.description = description;
    bool any_run = false;
    std::optional<Witness> skip_note;
    for (std::size_t i = 0; i < res.size(); ++i) {
      const Sample& r = res[i];
      if (r.skipped) {
        if (!skip_note) skip_note = Witness{pts[i], {}, r.note};
        continue;
      }
      any_run = true;
      if (std::isfinite(r.residual)) rec.max_residual = std::max(rec.max_residual, r.residual);
      const bool bad = r.error || !(r.residual <= tolerance);
      if (bad && !rec.witness) rec.witness = Witness{pts[i], {}, r.note};
    }
    if (!any_run) {
      rec.status = CheckStatus::Skipped;
      rec.witness = skip_note;
    } else {
      rec.status = rec.witness ? CheckStatus::Fail : CheckStatus::Pass;
    }
    report.checks.push_back(std::move(rec));
  }
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

ojson sparse_tensor3(const Tensor3& t) {
  ojson a = ojson::array();
  const int d = t.dim();
  for (int c = 0; c < d; ++c) {
    for (int x = 0; x < d; ++x) {
      for (int y = 0; y < d; ++y) {
        if (t(c, x, y) != 0.0) a.push_back(ojson{{"upper", c}, {"a", x}, {"b", y}, {"value", t(c, x, y)}});
      }
    }
  }
  return a;
}

ojson sparse_tensor4(const Tensor4& t) {
  ojson a = ojson::array();
  const int d = t.dim();
  for (int u = 0; u < d; ++u) {
    for (int x = 0; x < d; ++x) {
      for (int y = x + 1; y < d; ++y) {
        for (int c = 0; c < d; ++c) {
          const double v = t(u, x, y, c);
          if (v != 0.0) a.push_back(ojson{{"upper", u}, {"a", x}, {"b", y}, {"c", c}, {"value", v}});
        }
      }
    }
  }
  return a;
}

bool is_flat(const ManifoldSpec& spec) {
  try {
    require_flat(spec, spec.region());
    return true;
  } catch (const NotFlat&) {
    return false;
  }
}

// ---------------------------------------------------------------------------

void validate_checks(const Context& ctx, const SamplingPlan& plan) {
  SamplingPlan p = plan;
  p.tolerance = ctx.tol(1e-9);
  p.threads = ctx.threads;
  for (auto& c : validate_spec(ctx.spec, p).checks) ctx.report.checks.push_back(std::move(c));
}

void connection_checks(const Context& ctx) {
  const ManifoldSpec& spec = ctx.spec;
  const ChartSpec& ch = spec.chart();
  ctx.sampled("uniqueness", "closed-form coefficients equal the defining-relation reconstruction",
              ctx.tol(1e-9), ctx.points, [&](const Vec& p) {
                const double d = connection_coeffs_at(spec, p).max_abs_diff(coeffs_from_defining_relations(spec, p));
                return Sample{d, "max |Gamma_closed - Gamma_relations| = " + fmt(d)};
              });
  ctx.sampled("parallel_omega", "nabla omega_alpha = 0 on all frame triples", ctx.tol(1e-9), ctx.points,
              [&](const Vec& p) {
                const double d = nabla_omega_residual(spec, p);
                return Sample{d, "max |(nabla omega)(e_a; e_b, e_c)| = " + fmt(d)};
              });
  auto torsion = [&](bool mixed) {
    return [&spec, &ch, mixed](const Vec& p) {
      const Tensor3 t = torsion_at(spec, p);
      const int dim = ch.dim();
      Sample s;
      for (int a = 0; a < dim; ++a) {
        for (int b = 0; b < dim; ++b) {
          const bool va = frame_block(ch, a) != 0, vb = frame_block(ch, b) != 0;
          if ((va != vb) != mixed) continue;
          for (int c = 0; c < dim; ++c) {
            if (std::abs(t(c, a, b)) > s.residual) {
              s.residual = std::abs(t(c, a, b));
              s.note = "T(e_" + std::to_string(a) + ", e_" + std::to_string(b) + ") has component " +
                       fmt(t(c, a, b)) + " on e_" + std::to_string(c);
            }
          }
        }
      }
      return s;
    };
  };
  ctx.sampled("torsion_mixed", "torsion vanishes on horizontal-vertical pairs", ctx.tol(1e-10), ctx.points,
              torsion(true));
  ctx.sampled("torsion_leafwise", "torsion vanishes on L x L and Q x Q", ctx.tol(1e-10), ctx.points,
              torsion(false));
  ctx.report.artifacts["connection_at_base"] = sparse_tensor3(connection_coeffs_at(spec, spec.base_point()));
}

void curvature_checks(const Context& ctx) {
  const ManifoldSpec& spec = ctx.spec;
  const ChartSpec& ch = spec.chart();
  ctx.sampled("curvature_leafwise", "curvature vanishes on L x L and Q x Q", ctx.tol(1e-9), ctx.points,
              [&](const Vec& p) {
                const Tensor4 r = curvature_at(spec, p);
                const int dim = ch.dim();
                Sample s;
                for (int a = 0; a < dim; ++a) {
                  for (int b = 0; b < dim; ++b) {
                    if ((frame_block(ch, a) != 0) != (frame_block(ch, b) != 0)) continue;
                    for (int c = 0; c < dim; ++c) {
                      for (int d = 0; d < dim; ++d) {
                        if (std::abs(r(d, a, b, c)) > s.residual) {
                          s.residual = std::abs(r(d, a, b, c));
                          s.note = "R(e_" + std::to_string(a) + ", e_" + std::to_string(b) + ")e_" +
                                   std::to_string(c) + " = " + fmt(r(d, a, b, c)) + " e_" + std::to_string(d);
                        }
                      }
                    }
                  }
                }
                return s;
              });
  ctx.sampled("curvature_oracle", "bracket-definition curvature equals the closed form", ctx.tol(1e-9),
              ctx.points, [&](const Vec& p) {
                const double d = curvature_at(spec, p).max_abs_diff(curvature_closed_form_at(spec, p));
                return Sample{d, "max |R_bracket - R_closed| = " + fmt(d)};
              });
  ctx.sampled("curvature_rigidity", "curvature vanishes identically when k >= 2", ctx.tol(1e-9), ctx.points,
              [&](const Vec& p) {
                if (ch.k < 2) return Sample{0.0, "k = 1", false, true};
                const double d = curvature_at(spec, p).max_abs();
                return Sample{d, "max |R| = " + fmt(d)};
              });
  ctx.report.artifacts["curvature_at_base"] = sparse_tensor4(curvature_at(spec, spec.base_point()));
}

void transport_checks(const Context& ctx) {
  const ManifoldSpec& spec = ctx.spec;
  const ChartSpec& ch = spec.chart();
  ctx.sampled("transport_leaf_loop", "transport around a loop inside a leaf returns the frame",
              ctx.tol(1e-9), ctx.first(10), [&](const Vec& p) {
                const double delta = 0.25;
                const int ya = y_index(ch, 1, 1), yb = ch.dim() - 1;
                std::vector<Vec> corners{p};
                auto shifted = [&](double da, double db) {
                  Vec q = p;
                  q[ya] += da;
                  q[yb] += db;
                  return q;
                };
                if (ya == yb) {
                  corners.push_back(shifted(delta, 0));
                } else {
                  corners.push_back(shifted(delta, 0));
                  corners.push_back(shifted(delta, delta));
                  corners.push_back(shifted(0, delta));
                }
                corners.push_back(p);
                Mat frame, inverse;
                frame_and_inverse(spec, p, frame, inverse);
                Mat m = frame;
                for (std::size_t i = 0; i + 1 < corners.size(); ++i) {
                  m = parallel_transport_frame(spec, Curve::line(corners[i], corners[i + 1] - corners[i], 1.0), m, 50);
                }
                const double d = (m - frame).cwiseAbs().maxCoeff();
                return Sample{d, "frame changed by " + fmt(d) + " around the loop"};
              });
}

void geodesic_checks(const Context& ctx) {
  const ManifoldSpec& spec = ctx.spec;
  const ChartSpec& ch = spec.chart();
  ctx.sampled("geodesic_vertical_straight", "geodesics with vertical initial velocity are straight lines",
              ctx.tol(1e-9), ctx.first(10), [&](const Vec& p) {
                const Vec v = Vec::Unit(ch.dim(), y_index(ch, 1, 1));
                const Curve g = geodesic(spec, p, v, 1.0, 20);
                double d = 0.0;
                for (std::size_t i = 0; i < g.times().size(); ++i) {
                  d = std::max(d, (g.points()[i] - (p + g.times()[i] * v)).cwiseAbs().maxCoeff());
                }
                return Sample{d, "deviation from the line " + fmt(d)};
              });
  ctx.sampled("geodesic_self_convergence", "horizontal geodesic agrees with a 10x finer integration",
              ctx.tol(1e-8), {spec.base_point()}, [&](const Vec& p) {
                Mat frame, inverse;
                frame_and_inverse(spec, p, frame, inverse);
                const Vec v = frame.col(0);
                const Vec coarse = geodesic(spec, p, v, 1.0, 100).end();
                const Vec fine = geodesic(spec, p, v, 1.0, 1000).end();
                ctx.report.artifacts["geodesic_endpoint"] = vec_json(fine);
                const double d = (coarse - fine).cwiseAbs().maxCoeff();
                return Sample{d, "endpoint difference " + fmt(d)};
              });
}

void rectangle_checks(const Context& ctx) {
  const ManifoldSpec& spec = ctx.spec;
  const ChartSpec& ch = spec.chart();
  const Vec& base = spec.base_point();
  std::optional<Rectangle> rect;
  std::string error;
  try {
    const Curve alpha = Curve::line(base, Vec::Unit(ch.dim(), y_index(ch, 1, 1)), 1.0, 5);
    const Curve beta = horizontal_integral_curve(spec, base, Vec::Unit(ch.n, 0), 1.0, 200);
    RectangleOptions opt;
    opt.threads = ctx.threads;
    rect = build_rectangle(spec, alpha, beta, opt);
  } catch (const std::exception& e) {
    error = e.what();
  }
  const bool flat = is_flat(spec);

  auto record = [&](const std::string& id, const std::string& desc, double tol,
                    const std::function<double()>& residual, bool needs_flat) {
    CheckRecord c;
    c.id = id;
    c.description = desc;
    if (!rect) {
      c.status = CheckStatus::Fail;
      c.witness = Witness{base, {}, error};
    } else {
      c.max_residual = residual();
      if (needs_flat && !flat) {
        c.status = CheckStatus::Skipped;
        c.witness = Witness{base, {}, "connection is not flat; residual reported only"};
      } else if (c.max_residual <= tol) {
        c.status = CheckStatus::Pass;
      } else {
        c.status = CheckStatus::Fail;
        c.witness = Witness{base, {}, "residual " + fmt(c.max_residual)};
      }
    }
    ctx.report.checks.push_back(std::move(c));
  };
  record("rectangle_axioms", "rectangle edges are vertical and horizontal and match the generators",
         ctx.tol(1e-6), [&] { return verify_rectangle(*rect, spec); }, true);
  record("rectangle_transport_tangency", "transported vertical vector stays tangent to the leaves",
         ctx.tol(1e-8), [&] { return rect->tangency; }, false);

  if (rect) {
    ojson grid = ojson::array();
    for (const auto& row : rect->sigma) {
      ojson r = ojson::array();
      for (const Vec& p : row) r.push_back(vec_json(p));
      grid.push_back(r);
    }
    ctx.report.artifacts["rectangle"] = ojson{{"t", rect->t}, {"s", rect->s}, {"sigma", grid}};
  }
}

void normal_form_checks(const Context& ctx) {
  const ManifoldSpec& spec = ctx.spec;
  auto skipped = [&](const std::string& id, const std::string& desc, const std::string& why) {
    CheckRecord c;
    c.id = id;
    c.description = desc;
    c.status = CheckStatus::Skipped;
    c.witness = Witness{spec.base_point(), {}, why};
    ctx.report.checks.push_back(std::move(c));
  };
  auto failed = [&](const std::string& id, const std::string& desc, const std::string& why) {
    CheckRecord c;
    c.id = id;
    c.description = desc;
    c.status = CheckStatus::Fail;
    c.witness = Witness{spec.base_point(), {}, why};
    ctx.report.checks.push_back(std::move(c));
  };
  const std::string d1 = "pulled-back forms and Q take the standard shape in the new chart";
  const std::string d2 = "flow parameters do not depend on the composition order";

  std::optional<CoordinateMap> map;
  try {
    map = normal_form_chart(spec, spec.base_point(), spec.region());
  } catch (const NotFlat& e) {
    skipped("normal_form_residual", d1, e.what());
    skipped("order_independence", d2, e.what());
    return;
  } catch (const std::exception& e) {
    failed("normal_form_residual", d1, e.what());
    failed("order_independence", d2, e.what());
    return;
  }

  ctx.sampled("normal_form_residual", d1, ctx.tol(1e-5), {spec.base_point()}, [&](const Vec&) {
    const double r = verify_normal_form(*map, spec, 10);
    return Sample{r, "max deviation " + fmt(r)};
  });
  const std::vector<Vec> probes = ctx.first(10);
  ctx.sampled("order_independence", d2, ctx.tol(1e-6), probes, [&](const Vec& p) {
    const double r = order_independence(*map, {p});
    return Sample{r, "parameter change " + fmt(r)};
  });

  ojson pairs = ojson::array();
  for (const Vec& p : probes) {
    try {
      pairs.push_back(ojson{{"p", vec_json(p)}, {"new", vec_json(map->forward(p))}});
    } catch (const Error&) {
      pairs.push_back(ojson{{"p", vec_json(p)}, {"new", nullptr}});
    }
  }
  ctx.report.artifacts["normal_form_pairs"] = pairs;
}

void kaehler_checks(const Context& ctx) {
  const ManifoldSpec& spec = ctx.spec;
  const int dim = spec.dim();
  auto precondition = [](const std::exception& e) {
    return dynamic_cast<const OrthogonalityError*>(&e) || dynamic_cast<const SingularMetric*>(&e);
  };
  for (int alpha = 1; alpha <= spec.chart().k; ++alpha) {
    const std::string a = std::to_string(alpha);
    ctx.sampled("kaehler_alpha" + a,
                "J_" + a + " squares to -I, swaps L_" + a + " and Q, ghat is a compatible metric",
                ctx.tol(1e-10), ctx.first(20), [&, alpha](const Vec& p) {
                  try {
                    const AlmostComplex ac = almost_complex(spec, alpha, p);
                    const double r = std::max({ac.j_squared, ac.block_swap, ac.compatibility, ac.invariance});
                    return Sample{r, "largest identity residual " + fmt(r)};
                  } catch (const std::exception& e) {
                    if (precondition(e)) return Sample{0.0, e.what(), false, true};
                    throw;
                  }
                });
    ctx.sampled("nijenhuis_alpha" + a, "Nijenhuis tensor of J_" + a + " agrees with a pure difference evaluation",
                ctx.tol(1e-5), ctx.first(5), [&, alpha](const Vec& p) {
                  try {
                    double gap = 0.0, size = 0.0;
                    for (int u = 0; u < dim; ++u) {
                      for (int v = u + 1; v < dim; ++v) {
                        const Vec n1 = nijenhuis_at(spec, alpha, p, u, v);
                        const Vec n2 = nijenhuis_at(spec, alpha, p, u, v, BracketMode::FiniteDifference);
                        gap = std::max(gap, (n1 - n2).cwiseAbs().maxCoeff());
                        size = std::max(size, n1.cwiseAbs().maxCoeff());
                      }
                    }
                    return Sample{gap, "max |N| = " + fmt(size) + ", evaluation gap " + fmt(gap)};
                  } catch (const std::exception& e) {
                    if (precondition(e)) return Sample{0.0, e.what(), false, true};
                    throw;
                  }
                });
  }
  try {
    ctx.report.artifacts["levi_civita_deviation_at_base"] = levi_civita_comparison(spec, spec.base_point());
  } catch (const std::exception& e) {
    ctx.report.artifacts["levi_civita_deviation_at_base"] = e.what();
  }
}

void charclass_checks(const Context& ctx) {
  const ManifoldSpec& spec = ctx.spec;
  const int n = spec.chart().n;
  ctx.sampled("curvature_form_slots", "curvature 2-form lives on horizontal-vertical slots only",
              ctx.tol(1e-10), ctx.points, [&](const Vec& p) {
                const double r = curvature_form_slot_residual(spec, p);
                return Sample{r, "forbidden coefficient " + fmt(r)};
              });
  ctx.sampled("wedge_power", "Omega^(n+1) vanishes", ctx.tol(1e-12), ctx.points, [&](const Vec& p) {
    const double r = wedge_power_residual(spec, p, n + 1);
    return Sample{r, "max coefficient of Omega^" + std::to_string(n + 1) + " = " + fmt(r)};
  });
  ctx.sampled("trace_power", "tr(Omega^m) vanishes in degree 2m > 2n", ctx.tol(1e-12), ctx.points,
              [&](const Vec& p) {
                const double r = invariant_polynomial_residual(spec, p, n + 1);
                return Sample{r, "max coefficient of tr(Omega^" + std::to_string(n + 1) + ") = " + fmt(r)};
              });
  try {
    ctx.report.artifacts["trace_omega_at_base"] = invariant_polynomial_residual(spec, spec.base_point(), 1);
  } catch (const std::exception& e) {
    ctx.report.artifacts["trace_omega_at_base"] = e.what();
  }
}

std::optional<Box> parse_box(const std::string& text, int dim) {
  if (text.empty()) return std::nullopt;
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw CLI::ValidationError("--box", "expected lo,hi");
  double lo = 0, hi = 0;
  try {
    std::size_t used = 0;
    lo = std::stod(text.substr(0, comma), &used);
    if (used != comma) throw std::invalid_argument("lo");
    const std::string rest = text.substr(comma + 1);
    hi = std::stod(rest, &used);
    if (used != rest.size()) throw std::invalid_argument("hi");
  } catch (const std::logic_error&) {
    throw CLI::ValidationError("--box", "expected two numbers lo,hi");
  }
  if (!(lo < hi)) throw CLI::ValidationError("--box", "lo must be below hi");
  return Box::cube(dim, lo, hi);
}

}  // namespace

ReportFile run_checks(const ManifoldSpec& spec, const std::string& command, const SamplingPlan& plan,
                      std::optional<double> tol) {
  ReportFile report;
  report.seed = plan.seed;
  SamplingPlan p = plan;
  if (!p.box) p.box = spec.region();
  Context ctx{spec, p.points(spec.chart()), worker_count(plan.threads), tol, report};
  const bool all = command == "all";
  if (all || command == "validate") validate_checks(ctx, p);
  if (all || command == "connection") connection_checks(ctx);
  if (all || command == "curvature") curvature_checks(ctx);
  if (all || command == "transport") transport_checks(ctx);
  if (all || command == "geodesic") geodesic_checks(ctx);
  if (all || command == "rectangle") rectangle_checks(ctx);
  if (all || command == "normal-form") normal_form_checks(ctx);
  if (all || command == "kaehler") kaehler_checks(ctx);
  if (all || command == "charclass") charclass_checks(ctx);
  return report;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Canonical connections of k-symplectic manifolds on Darboux charts", "ksym"};
  std::string command, spec_path, box_text, out_path;
  int samples = 100;
  std::uint64_t seed = 0;
  double tol = 1e-9;
  std::string commands;
  for (const auto& c : cli_commands()) commands += (commands.empty() ? "" : "|") + c;
  app.add_option("command", command, commands)->required();
  app.add_option("spec", spec_path, "spec file (JSON)")->required();
  app.add_option("--samples", samples, "sample points (default 100)")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "sampling seed (default 0)");
  app.add_option("--box", box_text, "sampling box lo,hi for every coordinate (default: spec region)");
  CLI::Option* tol_opt = app.add_option("--tol", tol, "tolerance replacing every per-check default");
  app.add_option("--out", out_path, "write the report here instead of stdout");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "ksym: " << e.what() << "\n" << app.help();
    return 2;
  }
  if (std::find(cli_commands().begin(), cli_commands().end(), command) == cli_commands().end()) {
    err << "ksym: unknown command \"" << command << "\"\n" << app.help();
    return 2;
  }

  ManifoldSpec spec(1, 1);
  std::string bytes;
  SamplingPlan plan;
  try {
    bytes = read_file(spec_path);
    spec = parse_spec(bytes);
    plan.sample_count = samples;
    plan.seed = seed;
    plan.box = parse_box(box_text, spec.dim());
  } catch (const CLI::ValidationError& e) {
    err << "ksym: " << e.what() << "\n" << app.help();
    return 2;
  } catch (const Error& e) {
    err << "ksym: " << spec_path << ": " << e.what() << "\n";
    return 2;
  }

  ReportFile report;
  try {
    report = run_checks(spec, command, plan, tol_opt->count() ? std::optional<double>(tol) : std::nullopt);
  } catch (const std::exception& e) {
    err << "ksym: " << e.what() << "\n";
    return 1;
  }
  report.spec_digest = sha256_hex(bytes);
  const std::string text = dump_json(to_json(report));

  if (out_path.empty()) {
    out << text;
  } else {
    std::ofstream f(out_path, std::ios::binary);
    if (!f || !(f << text)) {
      err << "ksym: cannot write " << out_path << "\n";
      return 2;
    }
    for (const auto& c : report.checks) {
      out << to_string(c.status) << "  " << c.id << "  " << c.max_residual << "\n";
    }
  }
  return report.all_passed() ? 0 : 1;
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace ksym
