// Acceptance suite: one line per criterion, nonzero exit if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "zsres/determinant.hpp"
#include "zsres/neumann.hpp"
#include "zsres/resonances.hpp"
#include "zsres/spectral_identities.hpp"
#include "zsres/zs_core.hpp"

using namespace zsres;

namespace {

struct Outcome {
  bool pass = false;
  std::string summary;
};

struct Criterion {
  int id;
  const char* title;
  double time_limit;  // seconds; <= 0 means none
  std::function<Outcome()> run;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Potential sin_squared() {
  std::vector<Complex> s(257);
  for (int k = 0; k < 257; ++k) s[k] = std::pow(std::sin(kPi * k / 256.0), 2);
  return make_sampled(s, 1.0);
}

std::vector<Complex> random_lambdas(std::uint64_t seed, int n, double re_span, double im_span) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> re(-re_span, re_span), im(-im_span, im_span);
  std::vector<Complex> out;
  for (int i = 0; i < n; ++i) {
    const double x = re(rng);
    out.emplace_back(x, im(rng));
  }
  return out;
}

SearchReport search_to(const Potential& p, double radius) {
  SearchOptions opt;
  opt.tol = 1e-11;
  return search_resonances(p, complete_search_region(p, radius), opt);
}

// Resonances of box(2,1) to |lambda| <= 300, shared by criteria 8-10.
const std::vector<Resonance>& box21_resonances() {
  static const std::vector<Resonance> rs = search_to(make_box(2.0, 1.0), 300.0).resonances;
  return rs;
}

Outcome free_system() {
  const Potential z = make_zero(1.0);
  double worst = 0.0;
  for (Complex lambda : random_lambdas(101, 100, 50.0, 5.0)) {
    const auto sc = scattering_coefficients(z, lambda);
    worst = std::max({worst, std::abs(sc.a - 1.0), std::abs(sc.b), std::abs(sc.b_tilde)});
    const Matrix2 s = s_matrix(z, lambda.real()).s;
    worst = std::max({worst, std::abs(s.m11 - 1.0), std::abs(s.m22 - 1.0), std::abs(s.m12), std::abs(s.m21)});
  }
  return {worst < 1e-12, fmt("max residual %.3g (< 1e-12)", worst)};
}

Outcome unitarity() {
  double worst_box = 0.0, worst_sin = 0.0;
  const Potential box = make_box(2.0, 1.0), smooth = sin_squared();
  for (int i = 0; i < 2000; ++i) {
    const double lambda = -100.0 + 200.0 * i / 1999.0;
    const auto b = scattering_coefficients(box, lambda);
    const auto s = scattering_coefficients(smooth, lambda);
    worst_box = std::max(worst_box, std::abs(std::norm(b.a) - std::norm(b.b) - 1.0));
    worst_sin = std::max(worst_sin, std::abs(std::norm(s.a) - std::norm(s.b) - 1.0));
  }
  return {std::max(worst_box, worst_sin) < 1e-9,
          fmt("box(2,1) %.3g, sin^2 %.3g over 2000 points (< 1e-9)", worst_box, worst_sin)};
}

Outcome oracle_equivalence() {
  const std::vector<std::pair<const char*, Potential>> cases{
      {"box(1,1)", make_box(1.0, 1.0)},
      {"box(0.5i,1)", make_box(Complex(0.0, 0.5), 1.0)},
      {"multibox", make_multibox({{0.4, Complex(0.5, 0.5)}, {0.6, -0.8}})},
      {"sin^2", sin_squared()}};
  double worst = -1.0, max_rem = 0.0;
  std::string where;
  for (const auto& [name, p] : cases) {
    if (norms(p).l1 > 1.0 + 1e-12) return {false, std::string(name) + " has ||q||_1 > 1"};
    for (Complex lambda : random_lambdas(303, 50, 10.0, 3.0)) {
      const SeriesResult s = a_series(p, lambda);
      const double excess = std::abs(a_value(p, lambda) - s.value) - s.remainder_bound;
      max_rem = std::max(max_rem, s.remainder_bound);
      if (excess > worst) {
        worst = excess;
        where = name;
      }
    }
  }
  return {worst < 1e-8, fmt("max(|a - series| - remainder) %.3g at %s (< 1e-8), max remainder %.3g", worst,
                            where.c_str(), max_rem)};
}

Outcome determinant_identity() {
  const Potential p = make_box(1.0, 1.0);
  bool ok = true;
  std::string s;
  for (Complex lambda : {Complex(0.0, 3.0), Complex(0.0, 5.0), Complex(0.0, 10.0), Complex(2.0, 5.0)}) {
    const DeterminantResult d = log_det(p, lambda);
    const double diff = std::abs(d.determinant() - a_value(p, lambda));
    ok = ok && diff < d.tail_bound + 1e-7;
    s += fmt("%s%g%+gi: %.2g (tail %.2g)", s.empty() ? "" : ", ", lambda.real(), lambda.imag(), diff, d.tail_bound);
  }
  return {ok, s};
}

SearchReport& counting_search() {
  static SearchReport rep = search_to(make_box(2.0, 1.0), 100.0);
  return rep;
}

Outcome counting() {
  const Potential p = make_box(2.0, 1.0);
  const SearchReport& rep = counting_search();
  std::vector<double> radii;
  for (int k = 1; k <= 200; ++k) radii.push_back(0.5 * k);
  const CountingReport c = counting_report(p, rep.resonances, radii, 50.0, 100.0);
  const double rel = std::abs(c.slope_estimate / (2.0 / kPi) - 1.0);
  return {rel < 0.15, fmt("slope %.4f vs 2/pi = %.4f, relative error %.3g (< 0.15), N(100) = %d", c.slope_estimate,
                          2.0 / kPi, rel, c.counts.back())};
}

Outcome winding_closure() {
  const SearchReport& rep = counting_search();
  double worst = 0.0;
  for (const auto& b : rep.boxes) worst = std::max(worst, b.residual);
  const bool ok = worst < 0.25 && rep.total_winding == rep.multiplicity_sum();
  return {ok, fmt("%zu boxes, max |winding - round| %.3g (< 0.25), winding %d, multiplicity sum %d", rep.boxes.size(),
                  worst, rep.total_winding, rep.multiplicity_sum())};
}

Outcome forbidden_domain() {
  const Potential p = sin_squared();
  const SearchReport rep = search_to(p, 40.0);
  std::vector<double> grid;
  for (int i = -8000; i <= 8000; ++i) grid.push_back(0.05 * i);
  const ForbiddenDomainReport f = forbidden_domain_check(p, rep.resonances, grid);
  const bool ok = !f.informational && !f.entries.empty() && f.all_within_safety;
  return {ok, fmt("%zu resonances (depth %.1f), C1 = %.4g at %g, max lhs / (1.5 C1 exp(-2 gamma Im)) = %.3g",
                  f.entries.size(), -rep.region.im_min, f.c1, f.argmax_c1, f.max_ratio)};
}

Outcome hadamard() {
  const Potential p = make_box(2.0, 1.0);
  const auto& rs = box21_resonances();
  bool ok = true;
  std::string s;
  for (Complex z : {Complex(-1.0, -0.5), Complex(0.5, 0.5), Complex(0.0, 1.2), Complex(-1.0, 1.0), Complex(1.0, -1.0)}) {
    const Complex a = a_value(p, z);
    const double e50 = std::abs(hadamard_eval(p, rs, z, 50.0).value / a - 1.0);
    const double e200 = std::abs(hadamard_eval(p, rs, z, 200.0).value / a - 1.0);
    ok = ok && e200 < e50 && e200 < 0.05;
    s += fmt("%s%g%+gi: %.3g -> %.3g", s.empty() ? "" : ", ", z.real(), z.imag(), e50, e200);
  }
  return {ok, "R=50 -> R=200: " + s};
}

Outcome breit_wigner() {
  const Potential p = make_box(2.0, 1.0);
  const auto& rs = box21_resonances();
  bool ok = true;
  std::string s;
  for (double lambda : {-3.0, 0.0, 3.0}) {
    const double fd = phase_derivative_fd(p, lambda);
    const double ex = phase_derivative_expansion(p, rs, lambda, 200.0);
    const double tail = breit_wigner_tail(p, rs, lambda, 200.0);
    ok = ok && std::abs(fd - ex) <= tail + 1e-3;
    s += fmt("%s%g: |fd - sum| %.3g (tail %.3g)", s.empty() ? "" : ", ", lambda, std::abs(fd - ex), tail);
  }
  return {ok, s};
}

Outcome resolvent_trace() {
  const Potential p = make_box(2.0, 1.0);
  const auto& rs = box21_resonances();
  std::vector<double> d;
  for (double r : {75.0, 150.0, 300.0}) d.push_back(resolvent_trace_sum(p, rs, Complex(1.0, 2.0), r).difference);
  const bool ok = d[1] < d[0] && d[2] < d[1] && d[2] < 0.05;
  return {ok, fmt("R = 75, 150, 300: %.4g, %.4g, %.4g (final < 0.05)", d[0], d[1], d[2])};
}

Outcome action_integral() {
  const Q0Report q = q0_action_check(sin_squared(), 400.0);
  return {q.relative_error < 0.02, fmt("%.6f vs ||q||^2/2 = %.6f, relative error %.3g (< 0.02)", q.total, q.target,
                                       q.relative_error)};
}

Outcome high_energy() {
  const HighEnergyReport h = high_energy_check(sin_squared(), {20.0, 40.0, 80.0});
  return {h.max_ratio <= 1.5, fmt("sin^2: r = %.4g, %.4g, %.4g; ratios %.3g, %.3g (<= 1.5)", h.scaled_second[0],
                                  h.scaled_second[1], h.scaled_second[2], h.ratios[0], h.ratios[1])};
}

Outcome conjugation() {
  double worst = 0.0;
  for (const Potential& p : {make_multibox({{0.4, Complex(1.0, 2.0)}, {0.6, Complex(-0.3, 0.5)}}), make_box(2.0, 1.0)}) {
    const Potential c = conjugate_negate(p);
    for (Complex lambda : random_lambdas(1313, 100, 20.0, 3.0))
      worst = std::max(worst, std::abs(std::conj(a_value(p, lambda)) - a_value(c, -std::conj(lambda))));
  }
  return {worst < 1e-10, fmt("max residual %.3g over 100 points in both half-planes (< 1e-10)", worst)};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "free-system identity", 0, free_system},
      {2, "unitarity on the real axis", 10, unitarity},
      {3, "transfer matrix vs Neumann series", 30, oracle_equivalence},
      {4, "a equals the Fredholm determinant", 20, determinant_identity},
      {5, "counting asymptotic", 300, counting},
      {6, "argument-principle closure", 0, winding_closure},
      {7, "forbidden domain for smooth q", 300, forbidden_domain},
      {8, "Hadamard reconstruction", 0, hadamard},
      {9, "Breit-Wigner expansion of the phase derivative", 0, breit_wigner},
      {10, "resolvent-trace sum", 0, resolvent_trace},
      {11, "action integral", 60, action_integral},
      {12, "high-energy law", 0, high_energy},
      {13, "conjugation symmetry", 0, conjugation},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.time_limit > 0 && secs > c.time_limit) {
      o.pass = false;
      o.summary += fmt(" [over the %.0f s limit]", c.time_limit);
    }
    if (!o.pass) ++failures;
    std::printf("[%s] %2d %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.title, o.summary.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
