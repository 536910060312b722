#pragma once

#include <cstddef>
#include <vector>

#include "zsres/types.hpp"

namespace zsres {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Cached n-point rule, 1 <= n <= 64.
const GaussRule& gauss_legendre(int n);

/// Cumulative integration matrix for the n-point rule: entry (i, j) is the
/// weight of f(t_j) in the integral of f over [-1, t_i]. Row-major n*n.
const std::vector<double>& gauss_cumulative_matrix(int n);

struct Panel {
  double left = 0.0;
  double right = 0.0;
  int order = 16;
  std::size_t offset = 0;  // index of the first node of this panel
  std::size_t piece = 0;   // index of the potential piece the panel lies in
};

/// Composite Gauss-Legendre grid. Panels are contiguous and ordered.
class PanelGrid {
 public:
  PanelGrid() = default;
  explicit PanelGrid(std::vector<Panel> panels);

  /// Split every interval [breaks[k], breaks[k+1]] into equal panels no longer
  /// than max_length. Panel::piece records k.
  static PanelGrid build(const std::vector<double>& breaks, double max_length, int order);

  const std::vector<Panel>& panels() const { return panels_; }
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }
  std::size_t size() const { return nodes_.size(); }
  double left() const { return panels_.front().left; }
  double right() const { return panels_.back().right; }

  /// Copy of this grid with the panel containing x split at x (no-op if x is
  /// already a panel edge). Returns the edge index of x through split_edge.
  PanelGrid split_at(double x, std::size_t& split_edge) const;

  /// Values at nodes and at the P+1 panel edges of a running integral.
  struct Running {
    std::vector<Complex> at_nodes;
    std::vector<Complex> at_edges;
  };

  /// L(x) = integral over [left, x] of exp(i*omega*(x - y)) f(y) dy.
  Running left_integral(const std::vector<Complex>& f, Complex omega) const;

  /// R(x) = integral over [x, right] of exp(i*omega*(y - x)) f(y) dy.
  Running right_integral(const std::vector<Complex>& f, Complex omega) const;

  Complex integrate(const std::vector<Complex>& f) const;

 private:
  void fill_nodes();

  std::vector<Panel> panels_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

/// Composite Gauss-Legendre integral of a real function on [a, b].
template <class F>
double integrate_panels(F&& f, double a, double b, int panels, int order) {
  const GaussRule& rule = gauss_legendre(order);
  const double h = (b - a) / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    for (int j = 0; j < order; ++j) sum += rule.weights[j] * 0.5 * h * f(mid + 0.5 * h * rule.nodes[j]);
  }
  return sum;
}

}  // namespace zsres
