#include <doctest.h>

#include <random>

#include "ksym/chart.hpp"
#include "ksym/errors.hpp"
#include "test_support.hpp"

using namespace ksym;
using testing::vec;

TEST_CASE("flat index convention") {
  CHECK(x_index({2, 2}, 2) == 1);
  CHECK(y_index({2, 2}, 2, 1) == 4);
  CHECK(y_index({1, 1}, 1, 1) == 1);
  CHECK(frame_block({2, 2}, 0) == 0);
  CHECK(frame_block({2, 2}, 3) == 1);
  CHECK(frame_block({2, 2}, 5) == 2);
  CHECK_THROWS_AS(x_index({1, 1}, 2), IndexOutOfRange);
  CHECK_THROWS_AS(y_index({1, 1}, 2, 1), IndexOutOfRange);
}

TEST_CASE("adapted frame") {
  const ManifoldSpec flat(2, 2);
  CHECK(adapted_frame_at(flat, Vec::Constant(6, 0.3)).matrix.isIdentity());

  const Mat f = adapted_frame_at(testing::curved11(), vec({0, 2})).matrix;
  CHECK(f(0, 0) == 1.0);
  CHECK(f(1, 0) == doctest::Approx(-2));
  CHECK(f.col(1) == vec({0, 1}));

  std::mt19937_64 rng(3);
  const ManifoldSpec k2 = testing::valid_k2();
  for (int i = 0; i < 20; ++i) {
    const Mat m = adapted_frame_at(k2, testing::random_point(rng, 3, 1)).matrix;
    CHECK(m.determinant() == doctest::Approx(1.0));
  }
  CHECK_THROWS_AS(adapted_frame_at(flat, Vec::Zero(3)), DimensionMismatch);
}

TEST_CASE("frame brackets") {
  const ManifoldSpec flat(2, 1);
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) CHECK(frame_bracket_at(flat, Vec::Ones(4), a, b).isZero());
  }
  // [Y, X] = -y Y for t = y^2/2
  const Vec br = frame_bracket_at(testing::curved11(), vec({0.7, 2}), 1, 0);
  CHECK(br[0] == doctest::Approx(0).epsilon(1e-14));
  CHECK(br[1] == doctest::Approx(-2));

  std::mt19937_64 rng(11);
  const ManifoldSpec s = testing::curved21();
  for (int i = 0; i < 50; ++i) {
    const FrameJet fj = frame_jet(s, testing::random_point(rng, 4, 1));
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) CHECK((fj.bracket(a, b) + fj.bracket(b, a)).isZero(1e-14));
    }
  }
}

TEST_CASE("frame jacobian matches differences") {
  const ManifoldSpec s = testing::valid_k2();
  const Vec p = vec({0.4, -0.2, 0.9});
  const FrameJet fj = frame_jet(s, p);
  const double h = 1e-6;
  for (int m = 0; m < 3; ++m) {
    Vec e = Vec::Zero(3);
    e[m] = h;
    const Mat d = (adapted_frame_at(s, p + e).matrix - adapted_frame_at(s, p - e).matrix) / (2 * h);
    for (int a = 0; a < 3; ++a) CHECK((d.col(a) - fj.jacobian[a].col(m)).cwiseAbs().maxCoeff() < 1e-8);
  }
}
