#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <random>

#include "zsres/zs_core.hpp"

using namespace zsres;

namespace {

using Dense = std::array<std::array<Complex, 2>, 2>;

Dense mul(const Dense& a, const Dense& b) {
  Dense c{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) c[i][j] += a[i][k] * b[k][j];
  return c;
}

// Scaling and squaring with a long Taylor series; no knowledge of the structure of A.
Dense expm(Dense a) {
  double norm = 0.0;
  for (auto& row : a)
    for (auto& v : row) norm = std::max(norm, std::abs(v));
  int squarings = 0;
  while (norm > 0.05) {
    norm *= 0.5;
    ++squarings;
  }
  const double scale = std::ldexp(1.0, -squarings);
  for (auto& row : a)
    for (auto& v : row) v *= scale;
  Dense result{{{1.0, 0.0}, {0.0, 1.0}}};
  Dense term = result;
  for (int k = 1; k < 30; ++k) {
    term = mul(term, a);
    for (auto& row : term)
      for (auto& v : row) v /= static_cast<double>(k);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) result[i][j] += term[i][j];
  }
  for (int s = 0; s < squarings; ++s) result = mul(result, result);
  return result;
}

Dense generator(Complex c, Complex lambda, double h) {
  return {{{kI * lambda * h, -kI * c * h}, {kI * std::conj(c) * h, -kI * lambda * h}}};
}

// Oracle for the full propagator 0 -> gamma of a piecewise potential.
Dense dense_propagator(const Potential& p, Complex lambda) {
  Dense m{{{1.0, 0.0}, {0.0, 1.0}}};
  for (std::size_t k = 0; k < p.piece_count(); ++k) m = mul(expm(generator(p.values()[k], lambda, p.piece_length(k))), m);
  return m;
}

// a = first component at 0 of the solution equal to exp(i lambda gamma) e+ at gamma.
Complex dense_a(const Potential& p, Complex lambda) {
  Dense back{{{1.0, 0.0}, {0.0, 1.0}}};
  for (std::size_t k = p.piece_count(); k-- > 0;)
    back = mul(back, expm(generator(p.values()[k], lambda, -p.piece_length(k))));
  return back[0][0] * std::exp(kI * lambda * p.support_end());
}

Complex box_a(Complex c, double gamma, Complex lambda) {
  const Complex kappa = std::sqrt(lambda * lambda - std::norm(c));
  return std::exp(kI * lambda * gamma) * (std::cos(kappa * gamma) - kI * lambda * std::sin(kappa * gamma) / kappa);
}

double max_diff(const Matrix2& m, const Dense& d) {
  return std::max({std::abs(m.m11 - d[0][0]), std::abs(m.m12 - d[0][1]), std::abs(m.m21 - d[1][0]),
                   std::abs(m.m22 - d[1][1])});
}

Potential sine_squared(std::size_t samples) {
  std::vector<Complex> s(samples);
  for (std::size_t k = 0; k < samples; ++k) s[k] = std::pow(std::sin(kPi * k / (samples - 1.0)), 2);
  return make_sampled(s, 1.0);
}

}  // namespace

TEST_CASE("free propagation is diagonal") {
  const Potential z = make_zero(2.0);
  const Complex lambda(1.3, -0.4);
  const Matrix2 m = transfer(z, lambda, 0.5, 1.75).value();
  CHECK(std::abs(m.m11 - std::exp(kI * lambda * 1.25)) < 1e-14);
  CHECK(std::abs(m.m22 - std::exp(-kI * lambda * 1.25)) < 1e-14);
  CHECK(std::abs(m.m12) == 0.0);
  CHECK(std::abs(m.m21) == 0.0);
}

TEST_CASE("piece exponential against a dense matrix exponential") {
  const Potential p = make_box(2.0, 1.0);
  CHECK(max_diff(transfer(p, 3.0, 0.0, 1.0).value(), dense_propagator(p, 3.0)) < 1e-10);

  const Potential mb = make_multibox({{0.3, Complex(1.0, 0.5)}, {0.2, 0.0}, {0.5, Complex(-0.7, 2.0)}});
  for (Complex lambda : {Complex(0.4, 0.2), Complex(-2.0, -1.5), Complex(5.0, 0.0), Complex(0.0, 3.0)})
    CHECK(max_diff(transfer(mb, lambda, 0.0, 1.0).value(), dense_propagator(mb, lambda)) < 1e-10);
}

TEST_CASE("kappa = 0 uses the removable-singularity limit") {
  const Potential p = make_box(2.0, 1.0);
  for (Complex lambda : {Complex(2.0, 0.0), Complex(-2.0, 0.0), Complex(2.0 + 1e-7, 0.0), Complex(2.0, 3e-6)}) {
    const TransferMatrix t = transfer(p, lambda, 0.0, 1.0);
    CHECK(std::abs(t.value().det() - 1.0) < 1e-12);
    CHECK(max_diff(t.value(), dense_propagator(p, lambda)) < 1e-12);
  }
  // Continuity across the Taylor and series switches.
  const Complex a0 = a_value(p, 2.0);
  CHECK(std::abs(a_value(p, 2.0 + 2e-5) - a0) < 1e-4);
  const Complex d_lo = a_derivative(p, 2.0 + 1e-9);
  const Complex d_hi = a_derivative(p, 2.0 + 0.1);
  const Complex fd = (a_value(p, 2.0 + 0.1 + 1e-6) - a_value(p, 2.0 + 0.1 - 1e-6)) / 2e-6;
  CHECK(std::abs(d_hi - fd) < 1e-7 * std::abs(fd));
  const Complex fd0 = (a_value(p, 2.0 + 1e-9 + 1e-6) - a_value(p, 2.0 + 1e-9 - 1e-6)) / 2e-6;
  CHECK(std::abs(d_lo - fd0) < 1e-7 * std::abs(fd0));
}

TEST_CASE("det = 1 and semigroup") {
  const Potential p = make_multibox({{0.4, Complex(1.0, -1.0)}, {0.6, 2.5}});
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> re(-20.0, 20.0), im(-4.0, 4.0), x(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    const Complex lambda(re(rng), im(rng));
    double x0 = x(rng), x1 = x(rng);
    if (x0 > x1) std::swap(x0, x1);
    const double xm = x0 + 0.37 * (x1 - x0);
    CHECK(std::abs(transfer(p, lambda, x0, x1).value().det() - 1.0) < 1e-10);
    const Matrix2 whole = transfer(p, lambda, x0, x1).value();
    const Matrix2 composed = transfer(p, lambda, xm, x1).value() * transfer(p, lambda, x0, xm).value();
    CHECK((whole + composed * Complex(-1.0, 0.0)).max_abs() < 1e-10 * std::max(1.0, whole.max_abs()));
  }
}

TEST_CASE("free system coefficients") {
  const Potential z = make_zero(1.0);
  for (Complex lambda : {Complex(0.0, 0.0), Complex(3.0, -2.0), Complex(-7.0, 4.0)}) {
    const auto sc = scattering_coefficients(z, lambda);
    CHECK(std::abs(sc.a - 1.0) < 1e-14);
    CHECK(std::abs(sc.b) == 0.0);
    CHECK(std::abs(sc.b_tilde) == 0.0);
    CHECK(a_derivative(z, lambda) == Complex{});
  }
}

TEST_CASE("box coefficients") {
  const Potential p = make_box(2.0, 1.0);
  const auto sc = scattering_coefficients(p, 5.0);
  CHECK(std::abs(std::norm(sc.a) - std::norm(sc.b) - 1.0) < 1e-10);
  CHECK(std::abs(sc.a - dense_a(p, 5.0)) < 1e-12);
  CHECK(std::abs(sc.a - box_a(2.0, 1.0, 5.0)) < 1e-12);
  CHECK(sc.wronskian_residual < 1e-12);

  // Closed forms for the reflection coefficients of a box.
  const Complex lambda(1.7, -0.8);
  const Complex kappa = std::sqrt(lambda * lambda - 4.0);
  const Complex s = std::sin(kappa) / kappa;
  const auto sl = scattering_coefficients(p, lambda);
  CHECK(std::abs(sl.b - (-kI * 2.0 * s * std::exp(-kI * lambda))) < 1e-12);
  CHECK(std::abs(sl.b_tilde - (-kI * 2.0 * s * std::exp(kI * lambda))) < 1e-12);
}

TEST_CASE("b_tilde is minus conj b at the conjugate point") {
  const Potential p = make_multibox({{0.5, Complex(1.0, 2.0)}, {0.5, Complex(-0.5, 0.3)}});
  for (Complex lambda : {Complex(2.0, 1.0), Complex(-1.0, -2.0), Complex(4.0, 0.0)}) {
    const auto sc = scattering_coefficients(p, lambda);
    const auto sb = scattering_coefficients(p, std::conj(lambda));
    CHECK(std::abs(sc.b_tilde + std::conj(sb.b)) < 1e-10);
  }
}

TEST_CASE("bounds on a") {
  const Potential p = make_box(2.0, 1.0);
  const auto n = norms(p);
  CHECK(std::abs(a_value(p, Complex(0.0, 10.0)) - 1.0) <= n.phi0 * n.l2 * n.l1 / std::sqrt(10.0));
  CHECK(std::abs(a_value(p, Complex(-1.0, -1.0))) <= std::exp(2.0) * std::cosh(2.0));

  const Potential mb = make_multibox({{0.3, Complex(1.0, -1.0)}, {0.7, 0.8}});
  const auto m = norms(mb);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> re(-30.0, 30.0), im(-5.0, 5.0);
  for (int i = 0; i < 200; ++i) {
    const Complex lambda(re(rng), im(rng));
    const double eta = lambda.imag();
    const double bound = std::exp(mb.support_end() * (std::abs(eta) - eta)) * (std::cosh(m.l1) - 1.0);
    CHECK(std::abs(a_value(mb, lambda) - 1.0) <= bound * (1.0 + 1e-12));
  }
}

TEST_CASE("a_derivative against finite differences and a Cauchy integral") {
  const Potential p = make_box(2.0, 1.0);
  const double h = 1e-5;
  const Complex fd = (a_value(p, 3.0 + h) - a_value(p, 3.0 - h)) / (2.0 * h);
  const Complex d = a_derivative(p, 3.0);
  CHECK(std::abs(d - fd) < 1e-6 * std::abs(d));

  const Potential mb = make_multibox({{0.25, Complex(0.5, 1.0)}, {0.5, 2.0}, {0.25, Complex(0.0, -1.0)}});
  for (Complex lambda : {Complex(3.0, 0.0), Complex(-1.0, -2.5), Complex(0.5, 1.5)}) {
    const double r = 0.5;
    const int n = 256;
    Complex sum{};
    for (int k = 0; k < n; ++k) {
      const Complex u = std::polar(1.0, 2.0 * kPi * k / n);
      sum += a_value(mb, lambda + r * u) / (r * u);
    }
    const Complex cauchy = sum / static_cast<double>(n);
    CHECK(std::abs(a_derivative(mb, lambda) - cauchy) < 1e-8 * std::max(1.0, std::abs(cauchy)));
  }
}

TEST_CASE("log-derivative is consistent with value and derivative") {
  const Potential p = sine_squared(65);
  const Complex lambda(4.0, -3.0);
  const auto ld = a_log_derivative(p, lambda);
  CHECK(std::abs(ld.ratio - a_derivative(p, lambda) / a_value(p, lambda)) < 1e-10 * std::abs(ld.ratio));
}

TEST_CASE("scaled propagation deep in the lower half-plane") {
  const Potential p = make_box(2.0, 1.0);
  const Complex lambda(30.0, -400.0);
  const ScaledComplex a = a_scaled(p, lambda);
  // log|a| from the closed form, evaluated with a shifted exponent.
  const Complex kappa = std::sqrt(lambda * lambda - 4.0);
  const Complex shifted = std::exp(kI * lambda - 400.0) *
                          (std::cos(kappa) - kI * lambda * std::sin(kappa) / kappa) * std::exp(-400.0);
  const double expected = std::log(std::abs(shifted)) + 800.0;
  CHECK(a.log_abs() == doctest::Approx(expected).epsilon(1e-12));
  CHECK_THROWS_AS(a_value(p, lambda), std::overflow_error);
  CHECK(std::isfinite(a_log_derivative(p, lambda).ratio.real()));
}

TEST_CASE("real-axis unitarity and the complex-plane identity") {
  for (const Potential& p : {make_box(2.0, 1.0), sine_squared(129), make_multibox({{0.5, Complex(0.0, 1.5)}, {1.0, -1.0}})}) {
    for (int i = 0; i <= 200; ++i) {
      const double lambda = -50.0 + 0.5 * i;
      const auto sc = scattering_coefficients(p, lambda);
      CHECK(std::abs(std::norm(sc.a) - std::norm(sc.b) - 1.0) < 1e-9);
    }
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> re(-10.0, 10.0), im(-5.0, 5.0);
    for (int i = 0; i < 50; ++i) {
      const Complex lambda(re(rng), im(rng));
      const auto s1 = scattering_coefficients(p, lambda);
      const auto s2 = scattering_coefficients(p, std::conj(lambda));
      const Complex id = s1.a * std::conj(s2.a) - s1.b * std::conj(s2.b);
      CHECK(std::abs(id - 1.0) < 1e-8);
    }
  }
}

TEST_CASE("conjugation symmetry") {
  const Potential p = make_multibox({{0.4, Complex(1.0, 2.0)}, {0.6, Complex(-0.3, 0.5)}});
  const Potential c = conjugate_negate(p);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> re(-20.0, 20.0), im(-4.0, 4.0);
  for (int i = 0; i < 100; ++i) {
    const Complex lambda(re(rng), im(rng));
    CHECK(std::abs(std::conj(a_value(p, lambda)) - a_value(c, -std::conj(lambda))) < 1e-10);
  }
}

TEST_CASE("no zeros in the closed upper half-plane") {
  const Potential p = make_box(2.0, 1.0);
  double min_real = 1e300, min_upper = 1e300;
  for (int i = -100; i <= 100; ++i) {
    min_real = std::min(min_real, std::abs(a_value(p, 0.2 * i)));
    for (int j = 1; j <= 20; ++j) min_upper = std::min(min_upper, std::abs(a_value(p, Complex(0.2 * i, 0.25 * j))));
  }
  CHECK(min_real >= 1.0 - 1e-12);
  CHECK(min_upper > 0.0);
}

TEST_CASE("S-matrix") {
  const SMatrix s0 = s_matrix(make_zero(1.0), 2.0);
  CHECK(std::abs(s0.s.m11 - 1.0) < 1e-14);
  CHECK(std::abs(s0.s.m12) < 1e-14);
  CHECK(std::abs(s0.s.m22 - 1.0) < 1e-14);

  const Potential p = make_box(2.0, 1.0);
  const SMatrix s = s_matrix(p, 5.0);
  CHECK(s.unitarity_residual <= 1e-9);
  const Complex a = a_value(p, 5.0);
  CHECK(std::abs(s.s.det() - std::exp(-2.0 * kI * std::arg(a))) < 1e-10);
}

TEST_CASE("scattering phase") {
  std::vector<double> grid;
  for (int i = 0; i <= 400; ++i) grid.push_back(-200.0 + i);
  const auto zero = scattering_phase(make_zero(1.0), grid);
  for (double v : zero) CHECK(std::abs(v) < 1e-12);

  const Potential p = make_box(2.0, 1.0);
  const auto phase = scattering_phase(p, grid);
  // a -> 1 along the real axis, so the anchored branch tends to 0 at both ends.
  CHECK(std::abs(phase.front()) < 0.05);
  CHECK(std::abs(phase.back()) < 0.05);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Complex a = a_value(p, grid[i]);
    const double wrapped = std::remainder(phase[i] - std::arg(a), 2.0 * kPi);
    CHECK(std::abs(wrapped) < 1e-10);
  }
  CHECK_THROWS_AS(scattering_phase(p, {1.0, 0.0}), std::invalid_argument);
}
