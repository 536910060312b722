#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "zsres/potential.hpp"

using namespace zsres;

namespace {
std::vector<Complex> sine_samples(std::size_t count, int power) {
  std::vector<Complex> s(count);
  for (std::size_t k = 0; k < count; ++k) s[k] = std::pow(std::sin(kPi * k / (count - 1.0)), power);
  return s;
}
}  // namespace

TEST_CASE("box norms") {
  const auto n = norms(make_box(2.0, 1.0));
  CHECK(n.l1 == doctest::Approx(2.0));
  CHECK(n.l2 == doctest::Approx(2.0));
  CHECK(n.phi0 == doctest::Approx(std::cosh(2.0)).epsilon(1e-15));
  CHECK(n.phi0 == doctest::Approx(3.7622).epsilon(1e-4));

  const auto m = norms(make_box(Complex(1.0, 1.0), 0.5));
  CHECK(m.l2 * m.l2 == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(m.l1 == doctest::Approx(std::sqrt(2.0) * 0.5).epsilon(1e-15));
}

TEST_CASE("box rejects bad input") {
  CHECK_THROWS_AS(make_box(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_box(1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(make_box(1.0, -1.0), std::invalid_argument);
}

TEST_CASE("multibox") {
  const Potential p = make_multibox({{0.5, 1.0}, {0.5, -1.0}});
  CHECK(p.support_end() == 1.0);
  const auto n = norms(p);
  CHECK(n.l1 == doctest::Approx(1.0));
  CHECK(n.l2 == doctest::Approx(1.0));
  CHECK(p.warnings().empty());

  const Potential single = make_multibox({{1.0, Complex(0.0, 2.0)}});
  const Potential box = make_box(Complex(0.0, 2.0), 1.0);
  CHECK(single.breakpoints() == box.breakpoints());
  CHECK(single.values() == box.values());

  const Potential hull = make_multibox({{0.3, 0.0}, {0.7, 1.0}});
  REQUIRE(hull.warnings().size() == 1);
  CHECK(hull.warnings()[0].find("first piece") != std::string::npos);

  CHECK_THROWS_AS(make_multibox({}), std::invalid_argument);
}

TEST_CASE("sampled potentials") {
  const Potential p = make_sampled(sine_samples(1001, 1), 1.0);
  CHECK(p.piece_count() == 1000);
  const auto n = norms(p);
  CHECK(std::abs(n.l2 * n.l2 - 0.5) < 1e-4);

  const Potential two = make_sampled({1.0, 1.0}, 1.0);
  CHECK(two.values() == make_box(1.0, 1.0).values());
  CHECK(two.breakpoints() == make_box(1.0, 1.0).breakpoints());

  const Potential zero = make_sampled({0.0, 0.0, 0.0}, 1.0);
  CHECK_FALSE(zero.warnings().empty());
  CHECK(zero.is_zero());

  CHECK_THROWS_AS(make_sampled({1.0}, 1.0), std::invalid_argument);
}

TEST_CASE("sampled l2 converges under refinement") {
  // Cell means of a smooth function: the squared norm error is second order.
  const double exact = 3.0 / 8.0;
  const double e1 = std::abs(std::pow(norms(make_sampled(sine_samples(65, 2), 1.0)).l2, 2) - exact);
  const double e2 = std::abs(std::pow(norms(make_sampled(sine_samples(129, 2), 1.0)).l2, 2) - exact);
  CHECK(e2 < 0.3 * e1);
}

TEST_CASE("conjugate_negate") {
  const Potential b = conjugate_negate(make_box(2.0, 1.0));
  CHECK(b.values()[0] == Complex(-2.0, 0.0));
  const Potential i = conjugate_negate(make_box(Complex(0.0, 1.0), 1.0));
  CHECK(i.values()[0] == Complex(0.0, 1.0));
  const Potential m = conjugate_negate(make_multibox({{0.5, Complex(1.0, 1.0)}, {0.5, 2.0}}));
  CHECK(m.values()[0] == Complex(-1.0, 1.0));
  CHECK(m.values()[1] == Complex(-2.0, 0.0));
  CHECK(m.breakpoints() == std::vector<double>{0.0, 0.5, 1.0});

  const Potential s = make_sampled(sine_samples(33, 1), 2.0);
  const auto n0 = norms(s);
  const auto n1 = norms(conjugate_negate(s));
  CHECK(n0.l1 == n1.l1);
  CHECK(n0.l2 == n1.l2);
  CHECK(n0.phi0 == n1.phi0);
}

TEST_CASE("point evaluation and fingerprint") {
  const Potential p = make_multibox({{0.5, 1.0}, {0.5, -1.0}});
  CHECK(p(0.25) == Complex(1.0, 0.0));
  CHECK(p(0.5) == Complex(-1.0, 0.0));
  CHECK(p(1.0) == Complex{});
  CHECK(p(-0.1) == Complex{});
  CHECK(fingerprint(p) == fingerprint(make_multibox({{0.5, 1.0}, {0.5, -1.0}})));
  CHECK(fingerprint(p) != fingerprint(make_box(1.0, 1.0)));
  CHECK(fingerprint(p).size() == 16);
}
