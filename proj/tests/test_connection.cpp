#include <doctest.h>

#include <random>

#include "ksym/connection.hpp"
#include "ksym/ehresmann.hpp"
#include "ksym/errors.hpp"
#include "ksym/structures.hpp"
#include "test_support.hpp"

using namespace ksym;
using testing::vec;

namespace {

// n = 1, k = 1 frame indices
constexpr int X = 0, Y = 1;

std::vector<ManifoldSpec> random_k1_specs(std::mt19937_64& rng, int count) {
  std::vector<ManifoldSpec> out;
  for (int i = 0; i < count; ++i) {
    ManifoldSpec s(1, 1);
    s.set_t(1, 1, 1, ScalarField({1, 1}, testing::random_tree(rng, 2, 3)));
    out.push_back(s);
  }
  return out;
}

}  // namespace

TEST_CASE("closed-form coefficients") {
  CHECK(connection_coeffs_at(ManifoldSpec(2, 2), Vec::Constant(6, 0.5)).max_abs() == 0.0);
  CHECK(connection_coeffs_at(testing::linear11(), vec({0.3, -0.8})).max_abs() == 0.0);

  const ConnCoeffs g = connection_coeffs_at(testing::curved11(), vec({0.5, 2}));
  CHECK(g(Y, X, Y) == doctest::Approx(2));
  CHECK(g(X, X, X) == doctest::Approx(-2));
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      CHECK(g(a, Y, b) == 0.0);
    }
  }
  CHECK(g(X, X, Y) == 0.0);
  CHECK(g(Y, X, X) == 0.0);
}

TEST_CASE("defining relations reproduce the closed form") {
  CHECK(coeffs_from_defining_relations(ManifoldSpec(1, 2), Vec::Zero(3)).max_abs() == 0.0);
  std::mt19937_64 rng(5);
  for (const ManifoldSpec& s : {testing::curved11(), testing::curved21(), testing::valid_k2()}) {
    for (int i = 0; i < 20; ++i) {
      const Vec p = testing::random_point(rng, s.dim(), 1);
      CHECK(coeffs_from_defining_relations(s, p).max_abs_diff(connection_coeffs_at(s, p)) < 1e-10);
    }
  }
  ManifoldSpec degenerate(1, 1);
  degenerate.set_forms({TwoFormField({1, 1})});
  CHECK_THROWS_AS(coeffs_from_defining_relations(degenerate, Vec::Zero(2)), SingularSystem);
}

TEST_CASE("torsion") {
  CHECK(torsion_at(ManifoldSpec(2, 1), Vec::Ones(4)).max_abs() == 0.0);
  std::mt19937_64 rng(8);
  const ManifoldSpec s = testing::curved11();
  for (int i = 0; i < 50; ++i) {
    const Vec p = testing::random_point(rng, 2, 2);
    const Tensor3 t = torsion_at(s, p);
    CHECK(t.max_abs() < 1e-12);
  }
  const ManifoldSpec r = testing::curved21();
  for (int i = 0; i < 50; ++i) {
    const Tensor3 t = torsion_at(r, testing::random_point(rng, 4, 1));
    for (int c = 0; c < 4; ++c) {
      for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) CHECK(t(c, a, b) == doctest::Approx(-t(c, b, a)));
      }
    }
  }
}

TEST_CASE("curvature") {
  CHECK(curvature_at(ManifoldSpec(1, 2), Vec::Ones(3)).max_abs() == 0.0);
  CHECK(curvature_closed_form_at(ManifoldSpec(1, 2), Vec::Ones(3)).max_abs() == 0.0);

  std::mt19937_64 rng(13);
  const ManifoldSpec s = testing::curved11();
  for (int i = 0; i < 20; ++i) {
    const Vec p = testing::random_point(rng, 2, 3);
    const Tensor4 r = curvature_at(s, p);
    CHECK(r(Y, Y, X, Y) == doctest::Approx(1));
    CHECK(r(X, Y, X, X) == doctest::Approx(-1));
    CHECK(r(Y, X, Y, Y) == doctest::Approx(-1));
    CHECK(r.max_abs_diff(curvature_closed_form_at(s, p)) < 1e-12);
  }

  // leafwise vanishing on a spec with several blocks
  const ManifoldSpec r2 = testing::curved21();
  for (int i = 0; i < 20; ++i) {
    const Tensor4 r = curvature_at(r2, testing::random_point(rng, 4, 1));
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) {
        if ((a < 2) != (b < 2)) continue;
        for (int c = 0; c < 4; ++c) {
          for (int d = 0; d < 4; ++d) CHECK(std::abs(r(d, a, b, c)) < 1e-12);
        }
      }
    }
  }
}

TEST_CASE("bracket curvature equals the closed form on random specs") {
  std::mt19937_64 rng(21);
  for (const ManifoldSpec& s : random_k1_specs(rng, 5)) {
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const Vec p = testing::random_point(rng, 2, 1);
      worst = std::max(worst, curvature_at(s, p).max_abs_diff(curvature_closed_form_at(s, p)));
    }
    CHECK_MESSAGE(worst < 1e-9, format_field(s.t(1, 1, 1)));
  }
}

TEST_CASE("parallel forms") {
  std::mt19937_64 rng(4);
  for (const ManifoldSpec& s : {testing::curved11(), testing::curved21(), testing::valid_k2()}) {
    for (int i = 0; i < 20; ++i) CHECK(nabla_omega_residual(s, testing::random_point(rng, s.dim(), 1)) < 1e-12);
  }
}

TEST_CASE("curves") {
  const Curve c = Curve::line(vec({1, 2}), vec({3, -1}), 2.0, 5);
  CHECK(c.t1() == 2.0);
  CHECK((c.position(0.7) - vec({3.1, 1.3})).norm() < 1e-14);
  CHECK((c.velocity(1.3) - vec({3, -1})).norm() < 1e-14);
  const Curve q = Curve::from_samples({0, 0.5, 1}, {vec({0}), vec({0.25}), vec({1})});
  CHECK(q.position(0.5)[0] == doctest::Approx(0.25));
  CHECK_THROWS(Curve({1, 0}, {vec({0}), vec({1})}, {vec({0}), vec({0})}));
}

TEST_CASE("parallel transport") {
  // flat: vectors unchanged
  const Vec v = vec({0.3, -1.2, 2.0});
  CHECK((parallel_transport(ManifoldSpec(1, 2), Curve::line(Vec::Zero(3), vec({1, 1, 1}), 1), v, 10) - v).norm() == 0.0);

  // Y along the X-integral curve of y^2/2 from (0,1): factor (2/(2+s))^2 = 1/4 at s = 2
  const ManifoldSpec s = testing::curved11();
  const Curve h = horizontal_integral_curve(s, vec({0, 1}), vec({1}), 2.0, 2000);
  const Vec w = parallel_transport(s, h, vec({0, 1}), 2000);
  CHECK(w[0] == doctest::Approx(0).epsilon(1e-12));
  CHECK(std::abs(w[1] - 0.25) < 1e-6);
  const auto path = parallel_transport_path(s, h, vec({0, 1}), 2000);
  CHECK(path.size() == 2001);
  CHECK(std::abs(path[1000][1] - 4.0 / 9.0) < 1e-6);

  // vertical curves preserve adapted-frame components
  const Vec p0 = vec({0.2, 0.1});
  const Curve vert = Curve::line(p0, vec({0, 1}), 1.5);
  Mat f0, i0, f1, i1;
  frame_and_inverse(s, p0, f0, i0);
  frame_and_inverse(s, vert.end(), f1, i1);
  const Vec x0 = f0.col(0);
  const Vec out = parallel_transport(s, vert, x0, 100);
  CHECK((i1 * out - Vec::Unit(2, 0)).norm() < 1e-12);
}

TEST_CASE("geodesics") {
  const Curve line = geodesic(ManifoldSpec(1, 1), vec({1, 1}), vec({2, 3}), 1.0, 10);
  CHECK((line.end() - vec({3, 4})).norm() < 1e-14);

  std::mt19937_64 rng(2);
  for (const ManifoldSpec& s : {testing::curved11(), testing::curved21(), testing::valid_k2()}) {
    const Vec p = testing::random_point(rng, s.dim(), 1);
    const Vec y = Vec::Unit(s.dim(), s.chart().n);
    const Curve g = geodesic(s, p, y, 1.0, 20);
    CHECK((g.end() - (p + y)).cwiseAbs().maxCoeff() < 1e-12);
  }

  const ManifoldSpec s = testing::curved11();
  const Vec x = vec({1, -1});
  const Vec coarse = geodesic(s, vec({0, 1}), x, 1.0, 100).end();
  const Vec fine = geodesic(s, vec({0, 1}), x, 1.0, 1000).end();
  CHECK((coarse - fine).cwiseAbs().maxCoeff() < 1e-8);

  CHECK_THROWS_AS(geodesic(ManifoldSpec(1, 1), vec({0, 1}), vec({0, 1e7}), 1.0, 10), IncompleteLeaf);
}
