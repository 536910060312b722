#include "zsres/determinant.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "zsres/parallel.hpp"
#include "zsres/quadrature.hpp"
#include "zsres/zs_core.hpp"

namespace zsres {
namespace {

// (e^w - 1) / w
Complex phi1(Complex w) {
  if (std::abs(w) < 0.5) {
    Complex term(1.0, 0.0), sum(1.0, 0.0);
    for (int k = 2; k < 22; ++k) {
      term *= w / static_cast<double>(k);
      sum += term;
    }
    return sum;
  }
  return (std::exp(w) - 1.0) / w;
}

class TailIntegral {
 public:
  TailIntegral(const Potential& p, Complex lambda) : p_(p), lambda_(lambda) {
    const std::size_t m = p.piece_count();
    at_break_.assign(m + 1, Complex{});
    for (std::size_t k = m; k-- > 0;) at_break_[k] = within(k, p.breakpoints()[k]);
  }

  // F(x) for x in piece k.
  Complex within(std::size_t k, double x) const {
    const double d = p_.breakpoints()[k + 1] - x;
    const Complex w = 2.0 * kI * lambda_ * d;
    return std::conj(p_.values()[k]) * d * phi1(w) + std::exp(w) * at_break_[k + 1];
  }

 private:
  const Potential& p_;
  Complex lambda_;
  std::vector<Complex> at_break_;
};

void require_upper(Complex lambda) {
  if (!(lambda.imag() > 0.0)) throw std::domain_error("determinant: Im lambda must be positive");
}

PanelGrid outer_grid(const Potential& p, Complex lambda, int m) {
  if (m < 16) throw std::invalid_argument("determinant: at least 16 nodes required");
  const double gamma = p.support_end();
  const double h = std::min(2.0 / std::max(std::abs(lambda), 1e-12), gamma * 16.0 / m);
  PanelGrid coarse = PanelGrid::build(p.breakpoints(), h, 16);
  const std::size_t panels = coarse.panels().size();
  const int order = std::clamp(static_cast<int>(std::lround(static_cast<double>(m) / panels)), 4, 16);
  return PanelGrid::build(p.breakpoints(), h, order);
}

struct NodeData {
  std::vector<Complex> q;
  std::vector<Complex> f;
};

NodeData node_data(const PanelGrid& grid, const Potential& p, const TailIntegral& tail) {
  NodeData d;
  d.q.resize(grid.size());
  d.f.resize(grid.size());
  for (const Panel& pn : grid.panels()) {
    for (int j = 0; j < pn.order; ++j) {
      const std::size_t i = pn.offset + j;
      d.q[i] = p.values()[pn.piece];
      d.f[i] = tail.within(pn.piece, grid.nodes()[i]);
    }
  }
  return d;
}

}  // namespace

Complex KernelDiscretization::trace() const {
  Complex t{};
  for (std::size_t i = 0; i < size(); ++i) t += at(i, i);
  return t;
}

double KernelDiscretization::frobenius_norm() const {
  double s = 0.0;
  for (Complex v : matrix) s += std::norm(v);
  return std::sqrt(s);
}

KernelDiscretization build_kernel(const Potential& p, Complex lambda, int m) {
  require_upper(lambda);
  const PanelGrid grid = outer_grid(p, lambda, m);
  const TailIntegral tail(p, lambda);
  const NodeData d = node_data(grid, p, tail);
  KernelDiscretization k;
  k.lambda = lambda;
  k.nodes = grid.nodes();
  k.weights = grid.weights();
  const std::size_t n = grid.size();
  k.matrix.resize(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double dx = std::abs(k.nodes[i] - k.nodes[j]);
      const Complex f = k.nodes[i] >= k.nodes[j] ? d.f[i] : d.f[j];
      k.matrix[i * n + j] =
          std::sqrt(k.weights[i] * k.weights[j]) * (-d.q[i]) * std::exp(kI * lambda * dx) * f;
    }
  }
  return k;
}

std::vector<Complex> kernel_power_traces(const Potential& p, Complex lambda, int terms, int m, int threads) {
  require_upper(lambda);
  if (terms < 1) throw std::invalid_argument("determinant: at least one trace term required");
  const PanelGrid outer = outer_grid(p, lambda, m);
  const TailIntegral tail(p, lambda);
  const NodeData od = node_data(outer, p, tail);
  const std::size_t n = outer.size();

  std::vector<Panel> fine = outer.panels();
  for (Panel& pn : fine) pn.order = 16;
  const PanelGrid base(std::move(fine));

  std::vector<std::vector<Complex>> diag(n);
  parallel_for(n, threads, [&](std::size_t j) {
    const double y = outer.nodes()[j];
    std::size_t edge = 0;
    const PanelGrid inner = base.split_at(y, edge);
    const NodeData id = node_data(inner, p, tail);
    const std::size_t s = inner.size();
    const Complex qy = od.q[j], fy = od.f[j];
    std::vector<Complex> col(s), g(s);
    for (std::size_t i = 0; i < s; ++i) {
      const double x = inner.nodes()[i];
      col[i] = -id.q[i] * std::exp(kI * lambda * std::abs(x - y)) * (x >= y ? id.f[i] : fy);
    }
    auto& out = diag[j];
    out.resize(terms);
    out[0] = -qy * fy;
    for (int k = 1; k < terms; ++k) {
      const auto left = inner.left_integral(col, lambda);
      for (std::size_t i = 0; i < s; ++i) g[i] = id.f[i] * col[i];
      const auto right = inner.right_integral(g, lambda);
      out[k] = -qy * (fy * left.at_edges[edge] + right.at_edges[edge]);
      for (std::size_t i = 0; i < s; ++i) col[i] = -id.q[i] * (id.f[i] * left.at_nodes[i] + right.at_nodes[i]);
    }
  });

  std::vector<Complex> traces(terms, Complex{});
  for (std::size_t j = 0; j < n; ++j)
    for (int k = 0; k < terms; ++k) traces[k] += outer.weights()[j] * diag[j][k];
  return traces;
}

double determinant_epsilon(const Potential& p, Complex lambda) {
  require_upper(lambda);
  const double l2 = norms(p).l2;
  return l2 * l2 / lambda.imag();
}

double determinant_tail_bound(double epsilon, int terms) {
  if (epsilon >= 1.0) return std::numeric_limits<double>::infinity();
  return std::pow(epsilon, terms + 1) / ((terms + 1) * (1.0 - epsilon));
}

DeterminantResult log_det(const Potential& p, Complex lambda, int terms, int m, int threads) {
  DeterminantResult r;
  r.lambda = lambda;
  r.epsilon = determinant_epsilon(p, lambda);
  if (r.epsilon >= 1.0) throw std::domain_error("determinant: ||q||_2^2 / Im lambda >= 1, series does not converge");
  const double l2 = norms(p).l2;
  r.in_default_region = lambda.imag() >= kDefaultRegionFactor * l2 * l2;
  if (terms == kAutoTerms) {
    terms = 1;
    while (terms < 200 && determinant_tail_bound(r.epsilon, terms) >= 1e-13) ++terms;
  }
  if (terms < 1) throw std::invalid_argument("determinant: at least one term required");
  r.tail_bound = determinant_tail_bound(r.epsilon, terms);
  if (p.is_zero()) {
    r.terms.assign(terms, Complex{});
    return r;
  }
  const auto traces = kernel_power_traces(p, lambda, terms, m, threads);
  for (int k = 0; k < terms; ++k) {
    r.terms.push_back(traces[k] / static_cast<double>(k + 1));
    r.log_d -= r.terms.back();
  }
  return r;
}

std::vector<DeterminantCheck> verify_a_equals_d(const Potential& p, const std::vector<Complex>& lambdas, int m,
                                                int threads) {
  std::vector<DeterminantCheck> out;
  for (Complex lambda : lambdas) {
    DeterminantCheck c;
    c.lambda = lambda;
    const DeterminantResult r = log_det(p, lambda, kAutoTerms, m, threads);
    const DeterminantResult fine = log_det(p, lambda, static_cast<int>(r.terms.size()), 2 * m, threads);
    c.a = a_value(p, lambda);
    c.d = r.determinant();
    c.residual = std::abs(c.d - c.a);
    c.tail_bound = r.tail_bound;
    c.quadrature_tol = std::abs(fine.determinant() - c.d);
    c.bound = c.tail_bound + c.quadrature_tol + 1e-8;
    c.epsilon = r.epsilon;
    c.terms = static_cast<int>(r.terms.size());
    c.in_default_region = r.in_default_region;
    c.pass = c.residual < c.bound;
    out.push_back(c);
  }
  return out;
}

}  // namespace zsres
