#include <doctest.h>

#include <random>

#include "ksym/charclass.hpp"
#include "ksym/errors.hpp"
#include "test_support.hpp"

using namespace ksym;
using testing::vec;

namespace {

FormValue random_form(std::mt19937_64& rng, int dim, int degree) {
  std::uniform_real_distribution<double> u(-1, 1);
  FormValue f(dim, degree);
  for (std::uint32_t mask = 0; mask < (1u << dim); ++mask) {
    if (std::popcount(mask) == degree) f.add_monomial(mask, u(rng));
  }
  return f;
}

double diff(const FormValue& a, const FormValue& b) { return (FormValue(a) += b * -1.0).max_abs(); }

}  // namespace

TEST_CASE("form basics") {
  FormValue f(3, 2);
  f.add({2, 0}, 1.5);
  CHECK(f.coefficient({0, 2}) == -1.5);
  f.add({1, 1}, 7.0);
  CHECK(f.coefficient({0, 1}) == 0.0);
  FormValue dx(2, 1), dy(2, 1);
  dx.add({0}, 1);
  dy.add({1}, 1);
  const FormValue w = wedge(dx, dy);
  CHECK(w.evaluate({vec({1, 0}), vec({0, 1})}) == 0.5);
  CHECK(w.evaluate({vec({0, 1}), vec({1, 0})}) == -0.5);
  CHECK(wedge(dx, dx).max_abs() == 0.0);
  CHECK_THROWS_AS(FormValue(40, 1), DegreeOverflow);
  CHECK(FormValue(3, 5).max_abs() == 0.0);
}

TEST_CASE("wedge is associative and graded commutative") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    const int dim = 5;
    const int p = static_cast<int>(rng() % 3), q = static_cast<int>(rng() % 3), r = static_cast<int>(rng() % 2);
    const FormValue a = random_form(rng, dim, p), b = random_form(rng, dim, q), c = random_form(rng, dim, r);
    CHECK(diff(wedge(wedge(a, b), c), wedge(a, wedge(b, c))) < 1e-14);
    const double sign = (p * q) % 2 ? -1.0 : 1.0;
    CHECK(diff(wedge(a, b), wedge(b, a) * sign) < 1e-14);
  }
}

TEST_CASE("curvature 2-form") {
  CHECK(curvature_two_form_at(ManifoldSpec(2, 1), Vec::Zero(4)).max_abs() == 0.0);

  const MatrixOfForms om = curvature_two_form_at(testing::curved11(), vec({0.3, 0.7}));
  // only the dx^dy slot carries coefficients
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      for (const auto& [mask, v] : om(a, b).coefficients()) CHECK((v == 0.0 || mask == 3u));
    }
  }
  // Omega^Y_Y(X, Y) = R(X,Y)Y / 2 = -1/2 and Omega^X_X(X, Y) = +1/2
  CHECK(om(1, 1).evaluate({vec({1, 0}), vec({0, 1})}) == doctest::Approx(-0.5));
  CHECK(om(0, 0).evaluate({vec({1, 0}), vec({0, 1})}) == doctest::Approx(0.5));

  std::mt19937_64 rng(12);
  for (const ManifoldSpec& s : {testing::curved21(), testing::valid_k2(), testing::curved11()}) {
    for (int i = 0; i < 20; ++i) CHECK(curvature_form_slot_residual(s, testing::random_point(rng, s.dim(), 1)) < 1e-10);
  }
}

TEST_CASE("wedge powers vanish above n") {
  CHECK(wedge_power_residual(ManifoldSpec(2, 2), Vec::Zero(6), 2) == 0.0);
  CHECK(wedge_power_residual(testing::curved11(), vec({0, 1}), 2) == 0.0);
  CHECK(wedge_power_residual(testing::curved11(), vec({0, 1}), 1) > 0.1);
  std::mt19937_64 rng(9);
  const ManifoldSpec s = testing::curved21();
  for (int i = 0; i < 10; ++i) {
    const Vec p = testing::random_point(rng, 4, 1);
    CHECK(wedge_power_residual(s, p, 3) < 1e-12);
    CHECK(invariant_polynomial_residual(s, p, 3) < 1e-12);
  }
  // degree 2m <= 2n is informational
  const FormValue tr1 = trace_power(s, vec({0.1, 0.2, 0.3, 0.4}), 1);
  CHECK(tr1.degree() == 2);
  CHECK(invariant_polynomial_residual(ManifoldSpec(2, 1), Vec::Zero(4), 1) == 0.0);
}

TEST_CASE("matrix wedge") {
  std::mt19937_64 rng(3);
  MatrixOfForms a{2, 1, {}}, b{2, 1, {}};
  for (int i = 0; i < 4; ++i) {
    a.entries.push_back(random_form(rng, 4, 1));
    b.entries.push_back(random_form(rng, 4, 1));
  }
  const MatrixOfForms ab = wedge(a, b);
  const FormValue expect = FormValue(wedge(a(0, 0), b(0, 1))) += wedge(a(0, 1), b(1, 1));
  CHECK(diff(ab(0, 1), expect) < 1e-15);
  CHECK(ab.degree == 2);
}
