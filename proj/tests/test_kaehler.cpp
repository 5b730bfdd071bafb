#include <doctest.h>

#include <random>

#include "ksym/errors.hpp"
#include "ksym/kaehler.hpp"
#include "ksym/structures.hpp"
#include "test_support.hpp"

using namespace ksym;
using testing::vec;

namespace {

ManifoldSpec with_metric(ManifoldSpec s, MetricKind kind) {
  s.set_metric({kind, {}});
  return s;
}

ManifoldSpec with_constant_metric(ManifoldSpec s, const Mat& g) {
  MetricSpec m{MetricKind::Field, {}};
  for (int r = 0; r < g.rows(); ++r) {
    for (int c = 0; c < g.cols(); ++c) m.entries.push_back(ScalarField::constant(s.chart(), g(r, c)));
  }
  s.set_metric(std::move(m));
  return s;
}

double max_abs(const Mat& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("structure operator") {
  const StructureOperator so = structure_operator(ManifoldSpec(1, 1), 1, Vec::Zero(2));
  Mat a(2, 2);
  a << 0, -0.5, 0.5, 0;
  CHECK(max_abs(so.A - a) < 1e-15);

  const StructureOperator s4 = structure_operator(with_constant_metric(ManifoldSpec(1, 1), 4 * Mat::Identity(2, 2)), 1, Vec::Zero(2));
  Mat a4(2, 2);
  a4 << 0, -0.125, 0.125, 0;
  CHECK(max_abs(s4.A - a4) < 1e-15);

  std::mt19937_64 rng(1);
  const ManifoldSpec c = with_metric(testing::curved21(), MetricKind::AdaptedIdentity);
  for (int i = 0; i < 10; ++i) {
    const StructureOperator s = structure_operator(c, 1, testing::random_point(rng, 4, 1));
    const Mat ga = s.G * s.A;
    CHECK(max_abs(ga + ga.transpose()) < 1e-12);
  }
  CHECK_THROWS_AS(structure_operator(testing::curved11(), 1, vec({0, 1})), OrthogonalityError);
}

TEST_CASE("sqrt_spd") {
  CHECK(max_abs(sqrt_spd(Mat::Identity(3, 3)) - Mat::Identity(3, 3)) < 1e-15);
  Mat d = Mat::Zero(2, 2);
  d.diagonal() << 4, 9;
  Mat d2 = Mat::Zero(2, 2);
  d2.diagonal() << 2, 3;
  CHECK(max_abs(sqrt_spd(d) - d2) < 1e-14);
  Mat m(2, 2);
  m << 2, 1, 1, 2;
  Mat r(2, 2);
  const double a = (std::sqrt(3.0) + 1) / 2, b = (std::sqrt(3.0) - 1) / 2;
  r << a, b, b, a;
  CHECK(max_abs(sqrt_spd(m) - r) < 1e-14);
  Mat neg(2, 2);
  neg << 1, 0, 0, -1;
  CHECK_THROWS_AS(sqrt_spd(neg), NotSPD);
  Mat asym(2, 2);
  asym << 1, 1, 0, 1;
  CHECK_THROWS_AS(sqrt_spd(asym), NotSPD);
}

TEST_CASE("almost complex structure on the flat chart") {
  const AlmostComplex ac = almost_complex(ManifoldSpec(1, 1), 1, Vec::Zero(2));
  Mat j(2, 2);
  j << 0, -1, 1, 0;
  CHECK(max_abs(ac.J - j) < 1e-12);
  CHECK(max_abs(ac.ghat - 0.5 * Mat::Identity(2, 2)) < 1e-12);
  // J Y = X in frame order (Y, X)
  CHECK(max_abs(ac.J * vec({1, 0}) - vec({0, 1})) < 1e-12);
}

TEST_CASE("almost complex identities on several structures") {
  std::mt19937_64 rng(17);
  const std::vector<ManifoldSpec> specs{
      ManifoldSpec(2, 2), with_metric(testing::curved11(), MetricKind::AdaptedIdentity),
      with_metric(testing::curved21(), MetricKind::AdaptedIdentity),
      with_metric(testing::valid_k2(), MetricKind::AdaptedIdentity),
      with_constant_metric(ManifoldSpec(1, 1), (Mat(2, 2) << 2, 0, 0, 5).finished())};
  for (const ManifoldSpec& s : specs) {
    for (int alpha = 1; alpha <= s.chart().k; ++alpha) {
      for (int i = 0; i < 10; ++i) {
        const AlmostComplex ac = almost_complex(s, alpha, testing::random_point(rng, s.dim(), 1));
        const int m = static_cast<int>(ac.J.rows());
        CHECK(max_abs(ac.J * ac.J + Mat::Identity(m, m)) < 1e-12);
        CHECK(ac.block_swap < 1e-12);
        CHECK(ac.compatibility < 1e-10);
        CHECK(ac.ghat_min_eigenvalue > 0);
        // J is ghat-orthogonal
        CHECK(max_abs(ac.J.transpose() * ac.ghat * ac.J - ac.ghat) < 1e-10);
      }
    }
  }
}

TEST_CASE("Nijenhuis tensor") {
  const ManifoldSpec flat(1, 1);
  CHECK(nijenhuis_at(flat, 1, Vec::Zero(2), 0, 1).cwiseAbs().maxCoeff() < 1e-9);

  const ManifoldSpec s = with_metric(testing::curved11(), MetricKind::AdaptedIdentity);
  std::mt19937_64 rng(6);
  for (int i = 0; i < 10; ++i) {
    const Vec p = testing::random_point(rng, 2, 1);
    const Vec n01 = nijenhuis_at(s, 1, p, 0, 1);
    const Vec n10 = nijenhuis_at(s, 1, p, 1, 0);
    CHECK((n01 + n10).cwiseAbs().maxCoeff() < 1e-8);
    const Vec fd = nijenhuis_at(s, 1, p, 0, 1, BracketMode::FiniteDifference);
    CHECK((n01 - fd).cwiseAbs().maxCoeff() < 1e-5);
  }
}

TEST_CASE("Levi-Civita comparison") {
  CHECK(levi_civita_comparison(ManifoldSpec(1, 1), Vec::Zero(2)) < 1e-12);
  const ManifoldSpec diag = with_constant_metric(ManifoldSpec(1, 1), (Mat(2, 2) << 3, 0, 0, 0.5).finished());
  CHECK(levi_civita_comparison(diag, vec({0.2, 0.4})) < 1e-10);
  // diagnostic only: finite on an adapted metric
  const double d = levi_civita_comparison(with_metric(testing::linear11(), MetricKind::AdaptedIdentity), vec({0.5, 0}));
  CHECK(std::isfinite(d));
}

TEST_CASE("metric errors") {
  const ManifoldSpec asym = with_constant_metric(ManifoldSpec(1, 1), (Mat(2, 2) << 1, 1, 0, 1).finished());
  CHECK_THROWS_AS(almost_complex(asym, 1, Vec::Zero(2)), SingularMetric);
  const ManifoldSpec indef = with_constant_metric(ManifoldSpec(1, 1), (Mat(2, 2) << 1, 0, 0, -1).finished());
  CHECK_THROWS_AS(almost_complex(indef, 1, Vec::Zero(2)), SingularMetric);
}
