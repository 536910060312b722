#include "zsres/neumann.hpp"

#include <algorithm>
#include <cmath>

#include "zsres/quadrature.hpp"

namespace zsres {
namespace {

// sum_{n>N} L^{2n+shift}/(2n+shift)! for shift 0 or 1, summed term by term.
double factorial_tail(double l, int terms, int shift) {
  double t = shift ? l : 1.0;
  int k = shift;  // current power
  const int start = 2 * (terms + 1) + shift;
  while (k < start) {
    t *= l * l / ((k + 1.0) * (k + 2.0));
    k += 2;
  }
  double sum = 0.0;
  for (int it = 0; it < 10000; ++it) {
    sum += t;
    if (t <= 1e-18 * sum && k > l) break;
    t *= l * l / ((k + 1.0) * (k + 2.0));
    k += 2;
  }
  return sum;
}

double growth(double distance, Complex lambda) {
  const double eta = lambda.imag();
  return std::exp(distance * (std::abs(eta) - eta));
}

struct SeriesGrid {
  PanelGrid grid;
  std::vector<Complex> q;
  double l1 = 0.0;
};

SeriesGrid build_grid(const Potential& p, double x, Complex lambda, const NeumannOptions& options) {
  const double gamma = p.support_end();
  if (std::abs(lambda.imag()) * gamma > options.max_exponent)
    throw std::domain_error("neumann series: |Im lambda| * gamma exceeds the supported range");
  std::vector<double> breaks{x};
  std::vector<std::size_t> piece_of;
  const auto& br = p.breakpoints();
  for (std::size_t k = 0; k < p.piece_count(); ++k) {
    if (br[k + 1] <= x) continue;
    piece_of.push_back(k);
    breaks.push_back(br[k + 1]);
  }
  const double h = 1.0 / (1.0 + std::abs(lambda) + p.max_abs());
  std::size_t panels = 0;
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k)
    panels += static_cast<std::size_t>(std::ceil((breaks[k + 1] - breaks[k]) / h));
  if (panels * static_cast<std::size_t>(options.order) > options.node_budget)
    throw QuadratureBudgetExceeded("neumann series: quadrature node budget exceeded");
  SeriesGrid sg{PanelGrid::build(breaks, h, options.order), {}, 0.0};
  sg.q.resize(sg.grid.size());
  for (const Panel& pn : sg.grid.panels()) {
    const Complex c = p.values()[piece_of[pn.piece]];
    for (int j = 0; j < pn.order; ++j) sg.q[pn.offset + j] = c;
    sg.l1 += std::abs(c) * (pn.right - pn.left);
  }
  return sg;
}

int pick_terms(int requested, int minimum, const NeumannOptions& options, auto&& remainder) {
  if (requested != kAutoTerms) {
    if (requested < 0) throw std::invalid_argument("neumann series: term count must be non-negative");
    return requested;
  }
  for (int n = minimum; n < options.max_terms; ++n)
    if (remainder(n) < options.target_remainder) return n;
  return options.max_terms;
}

// Runs the recursion chi_n(x) = int_x^gamma q(t) int_t^gamma e^{2 i lambda (s-t)} conj(q(s)) chi_{n-1}(s) ds dt.
// Calls visit(n, chi_n at nodes, chi_n at the left end) for n = 1..terms.
template <class Visit>
void run_recursion(const SeriesGrid& sg, Complex lambda, int terms, Visit&& visit) {
  const std::size_t m = sg.grid.size();
  std::vector<Complex> prev(m, Complex(1.0, 0.0)), g(m), f(m);
  for (int n = 1; n <= terms; ++n) {
    for (std::size_t i = 0; i < m; ++i) g[i] = std::conj(sg.q[i]) * prev[i];
    const auto inner = sg.grid.right_integral(g, 2.0 * lambda);
    for (std::size_t i = 0; i < m; ++i) f[i] = sg.q[i] * inner.at_nodes[i];
    const auto outer = sg.grid.right_integral(f, Complex{});
    prev = outer.at_nodes;
    visit(n, prev, outer.at_edges.front());
  }
}

}  // namespace

double chi_remainder(double tail_l1, double distance, Complex lambda, int terms) {
  return growth(distance, lambda) * factorial_tail(tail_l1, terms, 0);
}

double b_tilde_remainder(double l1, double gamma, Complex lambda, int terms) {
  return growth(gamma, lambda) * factorial_tail(l1, terms, 1);
}

SeriesResult chi_series(const Potential& p, double x, Complex lambda, int terms, const NeumannOptions& options) {
  const double gamma = p.support_end();
  if (!(x >= 0.0 && x <= gamma)) throw std::invalid_argument("chi_series: x must lie in [0, gamma]");
  SeriesResult out;
  out.value = 1.0;
  if (x == gamma) {
    out.terms_used = terms == kAutoTerms ? 0 : terms;
    out.per_term.assign(out.terms_used, Complex{});
    return out;
  }
  const SeriesGrid sg = build_grid(p, x, lambda, options);
  const double distance = gamma - x;
  out.terms_used = pick_terms(terms, 1, options, [&](int n) { return chi_remainder(sg.l1, distance, lambda, n); });
  out.remainder_bound = chi_remainder(sg.l1, distance, lambda, out.terms_used);
  run_recursion(sg, lambda, out.terms_used, [&](int, const std::vector<Complex>&, Complex at_x) {
    out.per_term.push_back(at_x);
    out.value += at_x;
  });
  return out;
}

SeriesResult a_series(const Potential& p, Complex lambda, int terms, const NeumannOptions& options) {
  return chi_series(p, 0.0, lambda, terms, options);
}

SeriesResult b_tilde_series(const Potential& p, Complex lambda, int terms, const NeumannOptions& options) {
  const double gamma = p.support_end();
  const SeriesGrid sg = build_grid(p, 0.0, lambda, options);
  SeriesResult out;
  out.terms_used = pick_terms(terms, 0, options, [&](int n) { return b_tilde_remainder(sg.l1, gamma, lambda, n); });
  out.remainder_bound = b_tilde_remainder(sg.l1, gamma, lambda, out.terms_used);
  const std::size_t m = sg.grid.size();
  std::vector<Complex> weight(m);
  for (std::size_t i = 0; i < m; ++i)
    weight[i] = -kI * std::exp(2.0 * kI * lambda * sg.grid.nodes()[i]) * std::conj(sg.q[i]) * sg.grid.weights()[i];
  auto project = [&](const std::vector<Complex>& chi) {
    Complex s{};
    for (std::size_t i = 0; i < m; ++i) s += weight[i] * chi[i];
    return s;
  };
  out.value = project(std::vector<Complex>(m, Complex(1.0, 0.0)));
  run_recursion(sg, lambda, out.terms_used, [&](int, const std::vector<Complex>& chi, Complex) {
    const Complex t = project(chi);
    out.per_term.push_back(t);
    out.value += t;
  });
  return out;
}

}  // namespace zsres
