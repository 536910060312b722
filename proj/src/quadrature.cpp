#include "zsres/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace zsres {
namespace {

constexpr int kMaxOrder = 64;

// Legendre P_0..P_{n} at t.
void legendre_values(double t, int n, std::vector<double>& out) {
  out.assign(n + 1, 0.0);
  out[0] = 1.0;
  if (n >= 1) out[1] = t;
  for (int k = 1; k < n; ++k) out[k + 1] = ((2.0 * k + 1.0) * t * out[k] - k * out[k - 1]) / (k + 1.0);
}

GaussRule compute_rule(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double t = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int k = 1; k < n; ++k) {
        const double p2 = ((2.0 * k + 1.0) * t * p1 - k * p0) / (k + 1.0);
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) {
        p1 = t;
        p0 = 1.0;
      }
      dp = n * (t * p1 - p0) / (t * t - 1.0);
      const double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-16) break;
    }
    rule.nodes[n - 1 - i] = t;
    rule.weights[n - 1 - i] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
  return rule;
}

std::vector<double> compute_cumulative(int n) {
  const GaussRule& rule = gauss_legendre(n);
  std::vector<double> q(static_cast<std::size_t>(n) * n, 0.0);
  std::vector<std::vector<double>> pj(n);
  for (int j = 0; j < n; ++j) legendre_values(rule.nodes[j], n, pj[j]);
  std::vector<double> pi;
  for (int i = 0; i < n; ++i) {
    legendre_values(rule.nodes[i], n, pi);
    // integral of P_k from -1 to t_i
    std::vector<double> ik(n);
    ik[0] = rule.nodes[i] + 1.0;
    for (int k = 1; k < n; ++k) ik[k] = (pi[k + 1] - pi[k - 1]) / (2.0 * k + 1.0);
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += 0.5 * (2.0 * k + 1.0) * pj[j][k] * ik[k];
      q[static_cast<std::size_t>(i) * n + j] = rule.weights[j] * s;
    }
  }
  return q;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  static const std::array<GaussRule, kMaxOrder + 1> rules = [] {
    std::array<GaussRule, kMaxOrder + 1> r;
    for (int k = 1; k <= kMaxOrder; ++k) r[k] = compute_rule(k);
    return r;
  }();
  if (n < 1 || n > kMaxOrder) throw std::invalid_argument("Gauss-Legendre order out of range");
  return rules[n];
}

const std::vector<double>& gauss_cumulative_matrix(int n) {
  static const std::array<std::vector<double>, kMaxOrder + 1> mats = [] {
    std::array<std::vector<double>, kMaxOrder + 1> m;
    for (int k = 1; k <= kMaxOrder; ++k) m[k] = compute_cumulative(k);
    return m;
  }();
  if (n < 1 || n > kMaxOrder) throw std::invalid_argument("Gauss-Legendre order out of range");
  return mats[n];
}

PanelGrid::PanelGrid(std::vector<Panel> panels) : panels_(std::move(panels)) {
  if (panels_.empty()) throw std::invalid_argument("panel grid needs at least one panel");
  fill_nodes();
}

void PanelGrid::fill_nodes() {
  nodes_.clear();
  weights_.clear();
  for (auto& p : panels_) {
    p.offset = nodes_.size();
    const GaussRule& rule = gauss_legendre(p.order);
    const double mid = 0.5 * (p.left + p.right);
    const double half = 0.5 * (p.right - p.left);
    for (int j = 0; j < p.order; ++j) {
      nodes_.push_back(mid + half * rule.nodes[j]);
      weights_.push_back(half * rule.weights[j]);
    }
  }
}

PanelGrid PanelGrid::build(const std::vector<double>& breaks, double max_length, int order) {
  if (breaks.size() < 2) throw std::invalid_argument("panel grid needs at least two breakpoints");
  if (!(max_length > 0.0)) throw std::invalid_argument("panel length must be positive");
  std::vector<Panel> panels;
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    const double a = breaks[k], b = breaks[k + 1];
    if (!(b > a)) continue;
    const int count = std::max(1, static_cast<int>(std::ceil((b - a) / max_length - 1e-9)));
    for (int s = 0; s < count; ++s) {
      Panel p;
      p.left = a + (b - a) * s / count;
      p.right = (s + 1 == count) ? b : a + (b - a) * (s + 1) / count;
      p.order = order;
      p.piece = k;
      panels.push_back(p);
    }
  }
  return PanelGrid(std::move(panels));
}

PanelGrid PanelGrid::split_at(double x, std::size_t& split_edge) const {
  std::vector<Panel> out;
  out.reserve(panels_.size() + 1);
  split_edge = panels_.size();
  for (std::size_t k = 0; k < panels_.size(); ++k) {
    const Panel& p = panels_[k];
    if (x == p.left) split_edge = out.size();
    if (x > p.left && x < p.right) {
      Panel a = p, b = p;
      a.right = x;
      b.left = x;
      out.push_back(a);
      split_edge = out.size();
      out.push_back(b);
    } else {
      out.push_back(p);
    }
  }
  if (x == panels_.back().right) split_edge = out.size();
  return PanelGrid(std::move(out));
}

PanelGrid::Running PanelGrid::left_integral(const std::vector<Complex>& f, Complex omega) const {
  Running r;
  r.at_nodes.assign(nodes_.size(), Complex{});
  r.at_edges.assign(panels_.size() + 1, Complex{});
  std::vector<Complex> ex, ey;
  for (std::size_t k = 0; k < panels_.size(); ++k) {
    const Panel& p = panels_[k];
    const int n = p.order;
    const auto& q = gauss_cumulative_matrix(n);
    const GaussRule& rule = gauss_legendre(n);
    const double mid = 0.5 * (p.left + p.right);
    const double half = 0.5 * (p.right - p.left);
    ex.resize(n);
    ey.resize(n);
    for (int j = 0; j < n; ++j) {
      const double d = nodes_[p.offset + j] - mid;
      ex[j] = std::exp(kI * omega * d);
      ey[j] = std::exp(-kI * omega * d) * f[p.offset + j];
    }
    const Complex carry = r.at_edges[k];
    for (int i = 0; i < n; ++i) {
      Complex s{};
      for (int j = 0; j < n; ++j) s += q[static_cast<std::size_t>(i) * n + j] * ey[j];
      const double xi = nodes_[p.offset + i];
      r.at_nodes[p.offset + i] = half * ex[i] * s + std::exp(kI * omega * (xi - p.left)) * carry;
    }
    Complex total{};
    for (int j = 0; j < n; ++j) total += rule.weights[j] * ey[j];
    r.at_edges[k + 1] = half * std::exp(kI * omega * half) * total + std::exp(kI * omega * (p.right - p.left)) * carry;
  }
  return r;
}

PanelGrid::Running PanelGrid::right_integral(const std::vector<Complex>& f, Complex omega) const {
  Running r;
  r.at_nodes.assign(nodes_.size(), Complex{});
  r.at_edges.assign(panels_.size() + 1, Complex{});
  std::vector<Complex> ex, ey;
  for (std::size_t kk = panels_.size(); kk-- > 0;) {
    const Panel& p = panels_[kk];
    const int n = p.order;
    const auto& q = gauss_cumulative_matrix(n);
    const GaussRule& rule = gauss_legendre(n);
    const double mid = 0.5 * (p.left + p.right);
    const double half = 0.5 * (p.right - p.left);
    ex.resize(n);
    ey.resize(n);
    for (int j = 0; j < n; ++j) {
      const double d = nodes_[p.offset + j] - mid;
      ex[j] = std::exp(-kI * omega * d);
      ey[j] = std::exp(kI * omega * d) * f[p.offset + j];
    }
    const Complex carry = r.at_edges[kk + 1];
    for (int i = 0; i < n; ++i) {
      Complex s{};
      for (int j = 0; j < n; ++j) s += (rule.weights[j] - q[static_cast<std::size_t>(i) * n + j]) * ey[j];
      const double xi = nodes_[p.offset + i];
      r.at_nodes[p.offset + i] = half * ex[i] * s + std::exp(kI * omega * (p.right - xi)) * carry;
    }
    Complex total{};
    for (int j = 0; j < n; ++j) total += rule.weights[j] * ey[j];
    r.at_edges[kk] = half * std::exp(kI * omega * half) * total + std::exp(kI * omega * (p.right - p.left)) * carry;
  }
  return r;
}

Complex PanelGrid::integrate(const std::vector<Complex>& f) const {
  Complex s{};
  for (std::size_t i = 0; i < nodes_.size(); ++i) s += weights_[i] * f[i];
  return s;
}

}  // namespace zsres
