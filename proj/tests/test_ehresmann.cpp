#include <doctest.h>

#include "ksym/ehresmann.hpp"
#include "ksym/errors.hpp"
#include "test_support.hpp"

using namespace ksym;
using testing::vec;

namespace {

double grid_error(const Rectangle& r, const std::function<Vec(double, double)>& exact) {
  double e = 0.0;
  for (std::size_t j = 0; j < r.s.size(); ++j) {
    for (std::size_t i = 0; i < r.t.size(); ++i) {
      e = std::max(e, (r.sigma[j][i] - exact(r.t[i], r.s[j])).cwiseAbs().maxCoeff());
    }
  }
  return e;
}

}  // namespace

TEST_CASE("horizontal integral curves") {
  CHECK((horizontal_integral_curve(ManifoldSpec(1, 1), Vec::Zero(2), vec({1}), 1, 10).end() - vec({1, 0})).norm() < 1e-14);
  CHECK((horizontal_integral_curve(testing::const11(), Vec::Zero(2), vec({1}), 1, 10).end() - vec({1, -1})).norm() < 1e-14);
  const Vec e = horizontal_integral_curve(testing::curved11(), vec({0, 1}), vec({1}), 2, 200).end();
  CHECK((e - vec({2, 0.5})).norm() < 1e-8);
  CHECK_THROWS(horizontal_integral_curve(ManifoldSpec(1, 1), Vec::Zero(2), vec({0}), 1, 10));
}

TEST_CASE("rectangle on the flat chart") {
  const ManifoldSpec s(1, 1);
  const Curve alpha = Curve::line(Vec::Zero(2), vec({0, 1}), 1.0);
  const Curve beta = Curve::line(Vec::Zero(2), vec({1, 0}), 1.0);
  const Rectangle r = build_rectangle(s, alpha, beta);
  CHECK(r.sigma.size() == 20);
  CHECK(r.sigma[0].size() == 20);
  CHECK(grid_error(r, [](double t, double sv) { return vec({sv, t}); }) < 1e-14);
  CHECK(verify_rectangle(r, s) < 1e-12);
  CHECK(r.tangency < 1e-14);

  // affine in (t, s): second differences vanish
  double second = 0.0;
  for (std::size_t j = 1; j + 1 < r.s.size(); ++j) {
    for (std::size_t i = 1; i + 1 < r.t.size(); ++i) {
      second = std::max(second, (r.sigma[j][i + 1] - 2 * r.sigma[j][i] + r.sigma[j][i - 1]).norm());
      second = std::max(second, (r.sigma[j + 1][i] - 2 * r.sigma[j][i] + r.sigma[j - 1][i]).norm());
    }
  }
  CHECK(second < 1e-12);
}

TEST_CASE("rectangle for constant t") {
  const ManifoldSpec s = testing::const11();
  const Curve alpha = Curve::line(Vec::Zero(2), vec({0, 1}), 1.0);
  const Curve beta = horizontal_integral_curve(s, Vec::Zero(2), vec({1}), 1.0, 50);
  const Rectangle r = build_rectangle(s, alpha, beta);
  CHECK(grid_error(r, [](double t, double sv) { return vec({sv, t - sv}); }) < 1e-12);
  CHECK(verify_rectangle(r, s) < 1e-8);
  CHECK(r.tangency < 1e-12);
}

TEST_CASE("rectangle chains") {
  const ManifoldSpec s = testing::const11();
  const Curve alpha = Curve::line(Vec::Zero(2), vec({0, 1}), 1.5, 4);
  const Curve beta = horizontal_integral_curve(s, Vec::Zero(2), vec({1}), 1.0, 50);
  const auto chain = build_rectangle_chain(s, alpha, beta, {0.5, 1.0});
  REQUIRE(chain.size() == 3);
  for (const auto& r : chain) CHECK(verify_rectangle(r, s) < 1e-8);
  CHECK((chain[1].sigma[0][0] - chain[0].sigma[0].back()).norm() < 1e-12);
  CHECK((chain[2].sigma.back().back() - vec({1, 0.5})).norm() < 1e-10);
}

TEST_CASE("hand-built grid that is not horizontal") {
  const ManifoldSpec s(1, 1);
  Rectangle r{Curve::line(Vec::Zero(2), vec({0, 1}), 1.0), Curve::line(Vec::Zero(2), vec({1, 0}), 1.0), {}, {}, {}, {}, 0.0};
  const int n = 11;
  for (int i = 0; i < n; ++i) {
    r.t.push_back(i / 10.0);
    r.s.push_back(i / 10.0);
  }
  for (int j = 0; j < n; ++j) {
    std::vector<Vec> row;
    for (int i = 0; i < n; ++i) row.push_back(vec({r.s[j], r.t[i] + r.s[j] * r.s[j]}));
    r.sigma.push_back(row);
  }
  CHECK(verify_rectangle(r, s) > 0.1);
}

TEST_CASE("rectangle preconditions") {
  const ManifoldSpec s(1, 1);
  const Curve vert = Curve::line(Vec::Zero(2), vec({0, 1}), 1.0);
  const Curve hor = Curve::line(Vec::Zero(2), vec({1, 0}), 1.0);
  CHECK_THROWS_AS(build_rectangle(s, hor, hor), NotVertical);
  CHECK_THROWS_AS(build_rectangle(s, vert, vert), NotHorizontal);
  const Curve bent({0, 0.5, 1}, {vec({0, 0}), vec({0, 0.25}), vec({0, 1})}, {vec({0, 0}), vec({0, 1}), vec({0, 2})});
  CHECK_THROWS_AS(build_rectangle(s, bent, hor), NotGeodesic);
  // a horizontal curve of a different structure is not horizontal here
  CHECK_THROWS_AS(build_rectangle(testing::const11(), vert, hor), NotHorizontal);
}

TEST_CASE("rectangle is independent of the worker count") {
  const ManifoldSpec s = testing::curved11();
  const Curve alpha = Curve::line(vec({0, 1}), vec({0, 1}), 1.0, 5);
  const Curve beta = horizontal_integral_curve(s, vec({0, 1}), vec({1}), 1.0, 100);
  RectangleOptions one, many;
  one.threads = 1;
  many.threads = 6;
  const Rectangle a = build_rectangle(s, alpha, beta, one), b = build_rectangle(s, alpha, beta, many);
  for (std::size_t j = 0; j < a.sigma.size(); ++j) {
    for (std::size_t i = 0; i < a.sigma[j].size(); ++i) CHECK(a.sigma[j][i] == b.sigma[j][i]);
  }
  CHECK(a.tangency < 1e-8);
}
