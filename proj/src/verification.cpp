#include "zsres/verification.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>

#include "zsres/determinant.hpp"
#include "zsres/parallel.hpp"
#include "zsres/resonances.hpp"
#include "zsres/spectral_identities.hpp"
#include "zsres/zs_core.hpp"

namespace zsres {
namespace {

Json complex_json(Complex z) { return Json::array({z.real(), z.imag()}); }

std::vector<Complex> random_points(std::uint64_t seed, int n, double re_span, double im_lo, double im_hi) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> re(-re_span, re_span), im(im_lo, im_hi);
  std::vector<Complex> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double x = re(rng);
    out.emplace_back(x, im(rng));
  }
  return out;
}

class Suite {
 public:
  Suite(const Potential& p, const VerifyOptions& o) : p_(p), opt_(o), norms_(norms(p)) {}

  CheckRecord run(const std::string& name);

 private:
  const Potential& p_;
  const VerifyOptions& opt_;
  PotentialNorms norms_;
  std::optional<SearchReport> search_;

  bool smooth() const { return p_.representation() == Representation::sampled; }

  const SearchReport& search() {
    if (!search_) {
      const ContourBox region = opt_.depth > 0.0 ? search_region(p_, opt_.radius, opt_.depth, opt_.depth_offset)
                                                 : complete_search_region(p_, opt_.radius, opt_.depth_offset);
      SearchOptions so;
      so.tol = opt_.tol;
      so.threads = opt_.threads;
      search_ = search_resonances(p_, region, so);
    }
    return *search_;
  }
  const std::vector<Resonance>& resonances() { return search().resonances; }

  double bound_for(const std::string& name, double fallback) const {
    const auto it = opt_.tolerances.find(name);
    return it == opt_.tolerances.end() ? fallback : it->second;
  }

  void finish(CheckRecord& r, double residual, double bound) const {
    r.residual = residual;
    r.bound = bound_for(r.name, bound);
    r.pass = r.residual <= r.bound;
  }

  void free_system(CheckRecord& r);
  void unitarity(CheckRecord& r);
  void complex_identity(CheckRecord& r);
  void conjugation(CheckRecord& r);
  void lemma_bounds(CheckRecord& r);
  void neumann_oracle(CheckRecord& r);
  void a_equals_d(CheckRecord& r);
  void hadamard(CheckRecord& r, bool convergence);
  void breit_wigner(CheckRecord& r);
  void breit_wigner_sign(CheckRecord& r);
  void resolvent_trace(CheckRecord& r, bool convergence);
  void weight_sum(CheckRecord& r);
  void q0_action(CheckRecord& r);
  void high_energy(CheckRecord& r);
  void forbidden_domain(CheckRecord& r);
  void counting(CheckRecord& r);
  void winding_closure(CheckRecord& r);
  void sector_concentration(CheckRecord& r);
};

struct Entry {
  const char* name;
  const char* anchor;
};

const std::vector<Entry>& entries() {
  static const std::vector<Entry> e{
      {"free_system", "q = 0 gives a = 1, b = 0, S = I"},
      {"unitarity", "|a|^2 - |b|^2 = 1 on the real axis"},
      {"complex_identity", "a(z) conj(a(conj z)) - b(z) conj(b(conj z)) = 1"},
      {"conjugation", "conj a(z, q) = a(-conj z, -conj q)"},
      {"lemma_bounds", "|a - 1| <= exp(gamma (|Im z| - Im z)) (cosh ||q||_1 - 1)"},
      {"neumann_oracle", "transfer-matrix a against the Neumann series"},
      {"a_equals_d", "a equals the modified Fredholm determinant in the upper half-plane"},
      {"hadamard", "a(0) exp(i gamma z) prod (1 - z / z_n) reproduces a"},
      {"hadamard_convergence", "Hadamard product error shrinks with the truncation radius"},
      {"breit_wigner", "d arg a / d lambda = gamma + sum Im z_n / |lambda - z_n|^2"},
      {"breit_wigner_sign", "Breit-Wigner density is nonpositive"},
      {"resolvent_trace", "-a'/a = -i gamma - sum 1 / (z - z_n)"},
      {"resolvent_trace_convergence", "resolvent-trace error shrinks with the truncation radius"},
      {"weight_sum", "sum |Im z_n| / |z_n|^2 converges"},
      {"q0_action", "(1/pi) int log|a| = ||q||_2^2 / 2"},
      {"high_energy", "a(i eta) = 1 + ||q||_2^2 / (2 eta) + O(eta^-2)"},
      {"forbidden_domain", "|z^2 + (i/2) z ||q||_2^2| <= C1 exp(-2 gamma Im z) at every resonance"},
      {"counting", "N(r) grows like 2 gamma r / pi"},
      {"winding_closure", "total winding equals the refined multiplicity sum"},
      {"sector_concentration", "resonances concentrate near the real directions"},
  };
  return e;
}

CheckRecord Suite::run(const std::string& name) {
  CheckRecord r;
  r.name = name;
  for (const auto& e : entries())
    if (name == e.name) r.anchor = e.anchor;
  static const std::map<std::string, std::function<void(Suite&, CheckRecord&)>> dispatch{
      {"free_system", [](Suite& s, CheckRecord& c) { s.free_system(c); }},
      {"unitarity", [](Suite& s, CheckRecord& c) { s.unitarity(c); }},
      {"complex_identity", [](Suite& s, CheckRecord& c) { s.complex_identity(c); }},
      {"conjugation", [](Suite& s, CheckRecord& c) { s.conjugation(c); }},
      {"lemma_bounds", [](Suite& s, CheckRecord& c) { s.lemma_bounds(c); }},
      {"neumann_oracle", [](Suite& s, CheckRecord& c) { s.neumann_oracle(c); }},
      {"a_equals_d", [](Suite& s, CheckRecord& c) { s.a_equals_d(c); }},
      {"hadamard", [](Suite& s, CheckRecord& c) { s.hadamard(c, false); }},
      {"hadamard_convergence", [](Suite& s, CheckRecord& c) { s.hadamard(c, true); }},
      {"breit_wigner", [](Suite& s, CheckRecord& c) { s.breit_wigner(c); }},
      {"breit_wigner_sign", [](Suite& s, CheckRecord& c) { s.breit_wigner_sign(c); }},
      {"resolvent_trace", [](Suite& s, CheckRecord& c) { s.resolvent_trace(c, false); }},
      {"resolvent_trace_convergence", [](Suite& s, CheckRecord& c) { s.resolvent_trace(c, true); }},
      {"weight_sum", [](Suite& s, CheckRecord& c) { s.weight_sum(c); }},
      {"q0_action", [](Suite& s, CheckRecord& c) { s.q0_action(c); }},
      {"high_energy", [](Suite& s, CheckRecord& c) { s.high_energy(c); }},
      {"forbidden_domain", [](Suite& s, CheckRecord& c) { s.forbidden_domain(c); }},
      {"counting", [](Suite& s, CheckRecord& c) { s.counting(c); }},
      {"winding_closure", [](Suite& s, CheckRecord& c) { s.winding_closure(c); }},
      {"sector_concentration", [](Suite& s, CheckRecord& c) { s.sector_concentration(c); }},
  };
  try {
    dispatch.at(name)(*this, r);
  } catch (const std::exception& e) {
    r.residual = std::numeric_limits<double>::max();
    r.bound = bound_for(name, 0.0);
    r.pass = false;
    r.details["error"] = e.what();
  }
  return r;
}

void Suite::free_system(CheckRecord& r) {
  const Potential z = make_zero(p_.support_end());
  r.inputs = {{"points", 100}, {"seed", 1}};
  double worst = 0.0;
  for (Complex lambda : random_points(1, 100, 50.0, -5.0, 5.0)) {
    const auto sc = scattering_coefficients(z, lambda);
    worst = std::max({worst, std::abs(sc.a - 1.0), std::abs(sc.b), std::abs(sc.b_tilde)});
    worst = std::max(worst, s_matrix(z, lambda.real()).unitarity_residual);
    const Matrix2 s = s_matrix(z, lambda.real()).s;
    worst = std::max({worst, std::abs(s.m11 - 1.0), std::abs(s.m22 - 1.0), std::abs(s.m12), std::abs(s.m21)});
  }
  finish(r, worst, 1e-12);
}

void Suite::unitarity(CheckRecord& r) {
  const int n = 2000;
  const double span = 100.0;
  r.inputs = {{"points", n}, {"lambda_min", -span}, {"lambda_max", span}};
  std::vector<double> res(n);
  parallel_for(n, opt_.threads, [&](std::size_t i) {
    const double lambda = -span + 2.0 * span * static_cast<double>(i) / (n - 1);
    const auto sc = scattering_coefficients(p_, lambda);
    res[i] = std::abs(std::norm(sc.a) - std::norm(sc.b) - 1.0);
  });
  finish(r, *std::max_element(res.begin(), res.end()), 1e-9);
}

void Suite::complex_identity(CheckRecord& r) {
  r.inputs = {{"points", 50}, {"seed", 3}, {"im_max", 5.0}};
  double worst = 0.0;
  for (Complex lambda : random_points(3, 50, 10.0, -5.0, 5.0)) {
    const auto s1 = scattering_coefficients(p_, lambda);
    const auto s2 = scattering_coefficients(p_, std::conj(lambda));
    worst = std::max(worst, std::abs(s1.a * std::conj(s2.a) - s1.b * std::conj(s2.b) - 1.0));
  }
  finish(r, worst, 1e-8);
}

void Suite::conjugation(CheckRecord& r) {
  const Potential c = conjugate_negate(p_);
  r.inputs = {{"points", 100}, {"seed", 5}, {"im_max", 3.0}};
  double worst = 0.0;
  for (Complex lambda : random_points(5, 100, 20.0, -3.0, 3.0))
    worst = std::max(worst, std::abs(std::conj(a_value(p_, lambda)) - a_value(c, -std::conj(lambda))));
  finish(r, worst, 1e-10);
}

void Suite::lemma_bounds(CheckRecord& r) {
  r.inputs = {{"points", 200}, {"seed", 7}};
  const double gamma = p_.support_end();
  const double scale = std::cosh(norms_.l1) - 1.0;
  double worst = 0.0;
  for (Complex lambda : random_points(7, 200, 30.0, -5.0, 5.0)) {
    const double eta = lambda.imag();
    const double dev = std::abs(a_value(p_, lambda) - 1.0);
    const double bound = std::exp(gamma * (std::abs(eta) - eta)) * scale;
    worst = std::max(worst, bound > 0.0 ? dev / bound : dev);
  }
  r.details["max_ratio"] = worst;
  finish(r, worst, 1.0 + 1e-12);
}

void Suite::neumann_oracle(CheckRecord& r) {
  const double im_max = std::min(3.0, 19.0 / p_.support_end());
  r.inputs = {{"points", 20}, {"seed", 9}, {"im_max", im_max}};
  double worst = -std::numeric_limits<double>::infinity(), max_remainder = 0.0;
  for (Complex lambda : random_points(9, 20, 10.0, -im_max, im_max)) {
    const SeriesResult s = a_series(p_, lambda);
    worst = std::max(worst, std::abs(a_value(p_, lambda) - s.value) - s.remainder_bound);
    max_remainder = std::max(max_remainder, s.remainder_bound);
  }
  r.details["max_remainder_bound"] = max_remainder;
  finish(r, worst, 1e-8);
}

void Suite::a_equals_d(CheckRecord& r) {
  std::vector<Complex> lambdas = opt_.determinant_lambdas;
  if (lambdas.empty()) {
    const double base = std::max(3.0, 1.5 * norms_.l2 * norms_.l2);
    lambdas = {Complex(0.0, base), Complex(0.0, base * 5.0 / 3.0), Complex(0.0, base * 10.0 / 3.0),
               Complex(2.0, base * 5.0 / 3.0)};
  }
  Json pts = Json::array();
  for (Complex z : lambdas) pts.push_back(complex_json(z));
  r.inputs = {{"lambdas", pts}, {"M", opt_.determinant_m}};
  double worst = -std::numeric_limits<double>::infinity();
  Json rows = Json::array();
  for (Complex lambda : lambdas) {
    const DeterminantResult d = log_det(p_, lambda, opt_.determinant_terms, opt_.determinant_m, opt_.threads);
    const Complex a = a_value(p_, lambda);
    const double diff = std::abs(d.determinant() - a);
    worst = std::max(worst, diff - d.tail_bound);
    rows.push_back({{"lambda", complex_json(lambda)},
                    {"difference", diff},
                    {"tail_bound", d.tail_bound},
                    {"epsilon", d.epsilon},
                    {"terms", static_cast<int>(d.terms.size())},
                    {"in_default_region", d.in_default_region}});
  }
  r.details["points"] = rows;
  finish(r, worst, 1e-7);
}

void Suite::hadamard(CheckRecord& r, bool convergence) {
  const auto& rs = resonances();
  const double big = opt_.radius, small = 0.25 * opt_.radius;
  std::vector<Complex> points;
  for (Complex z : {Complex(-1.0, -0.5), Complex(0.5, 0.5), Complex(0.0, 1.2), Complex(-1.0, 1.0), Complex(1.0, -1.0)}) {
    bool clear = true;
    for (const auto& res : rs)
      if (std::abs(res.location - z) < 0.1) clear = false;
    if (clear) points.push_back(z);
  }
  Json pts = Json::array();
  for (Complex z : points) pts.push_back(complex_json(z));
  r.inputs = {{"lambdas", pts}, {"radius", big}, {"small_radius", small}};
  double worst = 0.0, worst_ratio = 0.0;
  Json rows = Json::array();
  for (Complex z : points) {
    const Complex a = a_value(p_, z);
    const double e_big = std::abs(hadamard_eval(p_, rs, z, big).value / a - 1.0);
    const double e_small = std::abs(hadamard_eval(p_, rs, z, small).value / a - 1.0);
    worst = std::max(worst, e_big);
    worst_ratio = std::max(worst_ratio, e_small > 0.0 ? e_big / e_small : 0.0);
    rows.push_back({{"lambda", complex_json(z)},
                    {"error", e_big},
                    {"error_small_radius", e_small},
                    {"tail_estimate", hadamard_tail(p_, rs, z, big)}});
  }
  r.details["points"] = rows;
  if (convergence)
    finish(r, worst_ratio, 1.0);
  else
    finish(r, worst, 0.05);
}

void Suite::breit_wigner(CheckRecord& r) {
  const auto& rs = resonances();
  const double radius = opt_.radius;
  r.inputs = {{"lambdas", {-3.0, 0.0, 3.0}}, {"radius", radius}, {"fd_step", 1e-3}};
  double worst = -std::numeric_limits<double>::infinity();
  Json rows = Json::array();
  for (double lambda : {-3.0, 0.0, 3.0}) {
    const double fd = phase_derivative_fd(p_, lambda);
    const double ex = phase_derivative_expansion(p_, rs, lambda, radius);
    const double tail = breit_wigner_tail(p_, rs, lambda, radius);
    worst = std::max(worst, std::abs(fd - ex) - tail);
    rows.push_back({{"lambda", lambda}, {"finite_difference", fd}, {"expansion", ex}, {"tail_estimate", tail}});
  }
  r.details["points"] = rows;

  // Integrated form over [-W, W], reported without a tolerance.
  const double w = std::min(10.0, 0.25 * radius);
  std::vector<double> grid;
  for (int i = 0; i <= 400; ++i) grid.push_back(-w + 2.0 * w * i / 400.0);
  const auto phi = scattering_phase(p_, grid);
  double sum = 2.0 * p_.support_end() * w;
  for (const auto& res : rs) {
    if (std::abs(res.location) > radius) continue;
    const double x = res.location.real(), y = -res.location.imag();
    sum -= res.multiplicity * (std::atan((w - x) / y) + std::atan((w + x) / y));
  }
  r.details["phase_increment"] = {{"window", w}, {"phase", phi.back() - phi.front()}, {"expansion", sum}};
  finish(r, worst, 1e-3);
}

void Suite::breit_wigner_sign(CheckRecord& r) {
  const auto& rs = resonances();
  r.inputs = {{"lambda_min", -20.0}, {"lambda_max", 20.0}, {"points", 401}, {"radius", opt_.radius}};
  double worst = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 400; ++i) {
    const double lambda = -20.0 + 0.1 * i;
    worst = std::max(worst, breit_wigner_density(rs, lambda, opt_.radius).value.real());
  }
  if (rs.empty()) worst = 0.0;
  finish(r, worst, 0.0);
}

void Suite::resolvent_trace(CheckRecord& r, bool convergence) {
  const auto& rs = resonances();
  const Complex lambda(1.0, 2.0);
  const std::vector<double> radii{0.25 * opt_.radius, 0.5 * opt_.radius, opt_.radius};
  r.inputs = {{"lambda", complex_json(lambda)}, {"radii", radii}};
  std::vector<double> diff;
  Json rows = Json::array();
  for (double radius : radii) {
    const auto c = resolvent_trace_sum(p_, rs, lambda, radius);
    diff.push_back(c.difference);
    rows.push_back({{"radius", radius}, {"difference", c.difference}, {"tail_estimate", c.tail_estimate}});
  }
  r.details["radii"] = rows;
  if (convergence) {
    double ratio = 0.0;
    for (std::size_t i = 1; i < diff.size(); ++i) ratio = std::max(ratio, diff[i - 1] > 0.0 ? diff[i] / diff[i - 1] : 0.0);
    finish(r, ratio, 1.0);
  } else {
    finish(r, diff.back(), 0.05);
  }
}

void Suite::weight_sum(CheckRecord& r) {
  const auto& rs = resonances();
  const double rr = opt_.radius;
  const double s1 = imaginary_weight_sum(rs, 0.25 * rr), s2 = imaginary_weight_sum(rs, 0.5 * rr),
               s3 = imaginary_weight_sum(rs, rr);
  r.inputs = {{"radii", {0.25 * rr, 0.5 * rr, rr}}};
  r.details["sums"] = {s1, s2, s3};
  const double first = s2 - s1, second = s3 - s2;
  finish(r, first > 0.0 ? second / first : 0.0, 1.0);
}

void Suite::q0_action(CheckRecord& r) {
  const Q0Report q = q0_action_check(p_, opt_.q0_window, 0.5, 8, opt_.threads);
  r.inputs = {{"window", q.window}, {"panel_width", 0.5}, {"order", 8}};
  r.details = {{"integral", q.integral}, {"tail", q.tail}, {"total", q.total}, {"target", q.target}};
  finish(r, q.relative_error, smooth() ? 0.02 : 0.05);
}

void Suite::high_energy(CheckRecord& r) {
  const double base = std::max(20.0, 5.0 * norms_.l2 * norms_.l2);
  const std::vector<double> etas{base, 2.0 * base, 4.0 * base};
  const HighEnergyReport h = high_energy_check(p_, etas);
  r.inputs = {{"etas", etas}};
  r.details = {{"scaled_second", h.scaled_second}, {"scaled_first", h.scaled_first}, {"ratios", h.ratios}};
  if (smooth() || p_.is_zero()) {
    r.details["form"] = "eta^2 residual ratio";
    finish(r, h.max_ratio, 1.5);
  } else {
    // Without an integrable derivative only the o(1/eta) form holds: eta |deviation| must shrink.
    double ratio = 0.0;
    for (std::size_t i = 1; i < h.scaled_first.size(); ++i)
      ratio = std::max(ratio, h.scaled_first[i - 1] > 0.0 ? h.scaled_first[i] / h.scaled_first[i - 1] : 0.0);
    r.details["form"] = "eta residual ratio";
    finish(r, ratio, 1.0);
  }
}

void Suite::forbidden_domain(CheckRecord& r) {
  std::vector<double> grid;
  for (int i = -4000; i <= 4000; ++i) grid.push_back(0.1 * i);
  const ForbiddenDomainReport f = forbidden_domain_check(p_, resonances(), grid, opt_.threads);
  r.inputs = {{"grid_min", -400.0}, {"grid_max", 400.0}, {"grid_step", 0.1}, {"safety", f.safety}};
  r.informational = f.informational;
  r.details = {{"c0", f.c0},
               {"c1", f.c1},
               {"argmax_c1", f.argmax_c1},
               {"checked", static_cast<int>(f.entries.size())},
               {"all_within_modulus", f.all_within_modulus},
               {"log_curve_offset", f.log_curve_offset},
               {"log_curve_checked", f.log_curve_checked},
               {"log_curve_violations", f.log_curve_violations}};
  finish(r, f.max_ratio, 1.0);
}

void Suite::counting(CheckRecord& r) {
  std::vector<double> radii;
  for (int k = 1; k <= 100; ++k) radii.push_back(opt_.radius * k / 100.0);
  const CountingReport c = counting_report(p_, resonances(), radii);
  r.inputs = {{"radius", opt_.radius}, {"fit_min", c.fit_min}, {"fit_max", c.fit_max}};
  r.details = {{"slope", c.slope_estimate}, {"theoretical_slope", c.theoretical_slope}, {"count", c.counts.back()}};
  finish(r, c.theoretical_slope > 0.0 ? std::abs(c.slope_estimate / c.theoretical_slope - 1.0) : 0.0, 0.15);
}

void Suite::winding_closure(CheckRecord& r) {
  const SearchReport& s = search();
  r.inputs = {{"region", {s.region.re_min, s.region.re_max, s.region.im_min, s.region.im_max}}};
  r.details = {{"total_winding", s.total_winding},
               {"multiplicity_sum", s.multiplicity_sum()},
               {"boxes", static_cast<int>(s.boxes.size())},
               {"max_box_residual", s.max_box_residual},
               {"nudges", s.nudges}};
  const double mismatch = std::abs(s.total_winding - s.multiplicity_sum()) + (s.max_box_residual < 0.25 ? 0.0 : 1.0);
  finish(r, mismatch, 0.0);
}

void Suite::sector_concentration(CheckRecord& r) {
  const SectorReport s = zsres::sector_concentration(resonances(), opt_.radius);
  r.inputs = {{"radius", opt_.radius}, {"half_width", 0.3}};
  r.informational = true;
  r.details = {{"total", s.total}, {"symmetric_fraction", s.symmetric_fraction}, {"literal_fraction", s.literal_fraction}};
  finish(r, s.total > 0 ? 1.0 - s.symmetric_fraction : 0.0, 0.5);
}

}  // namespace

const std::vector<std::string>& identity_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& e : entries()) n.emplace_back(e.name);
    return n;
  }();
  return names;
}

std::vector<CheckRecord> run_verification(const Potential& p, const std::vector<std::string>& names,
                                          const VerifyOptions& options) {
  const auto& known = identity_names();
  for (const auto& n : names)
    if (std::find(known.begin(), known.end(), n) == known.end())
      throw std::invalid_argument("unknown identity '" + n + "'");
  std::vector<std::string> ordered;
  for (const auto& k : known)
    if (std::find(names.begin(), names.end(), k) != names.end()) ordered.push_back(k);
  Suite suite(p, options);
  std::vector<CheckRecord> out;
  for (const auto& n : ordered) out.push_back(suite.run(n));
  return out;
}

Json record_json(const CheckRecord& r) {
  return {{"name", r.name},       {"anchor", r.anchor},     {"inputs", r.inputs},
          {"residual", r.residual}, {"bound", r.bound},     {"pass", r.pass},
          {"informational", r.informational}, {"details", r.details}};
}

int count_failures(const std::vector<CheckRecord>& records) {
  int n = 0;
  for (const auto& r : records)
    if (!r.pass && !r.informational) ++n;
  return n;
}

Json report_json(const Potential& p, const std::vector<CheckRecord>& records) {
  const PotentialNorms n = norms(p);
  Json recs = Json::array();
  int passed = 0, informational = 0;
  for (const auto& r : records) {
    recs.push_back(record_json(r));
    if (r.pass) ++passed;
    if (r.informational) ++informational;
  }
  return {{"potential",
           {{"label", p.label()},
            {"fingerprint", fingerprint(p)},
            {"gamma", p.support_end()},
            {"l1", n.l1},
            {"l2", n.l2}}},
          {"records", recs},
          {"summary",
           {{"total", static_cast<int>(records.size())},
            {"passed", passed},
            {"failed", count_failures(records)},
            {"informational", informational}}}};
}

}  // namespace zsres
