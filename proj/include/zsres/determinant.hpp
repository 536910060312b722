#pragma once

#include <vector>

#include "zsres/neumann.hpp"
#include "zsres/potential.hpp"
#include "zsres/types.hpp"

namespace zsres {

/// Nystrom discretization of the composed kernel
///   K(x, y) = -q(x) exp(i lambda |x - y|) F(max(x, y)),
///   F(x) = int_x^gamma exp(2 i lambda (z - x)) conj(q(z)) dz,
/// in the symmetric sqrt(weight) convention, so trace(matrix) approximates Tr K.
struct KernelDiscretization {
  Complex lambda;
  std::vector<double> nodes;
  std::vector<double> weights;
  std::vector<Complex> matrix;  // row-major, size() x size()

  std::size_t size() const { return nodes.size(); }
  Complex at(std::size_t i, std::size_t j) const { return matrix[i * nodes.size() + j]; }
  Complex trace() const;
  double frobenius_norm() const;
};

KernelDiscretization build_kernel(const Potential& p, Complex lambda, int m = 96);

/// Tr K^k for k = 1..terms. Each diagonal value K^k(y, y) is computed by
/// applying K repeatedly to the column K(., y) on a grid split at y, which
/// keeps the quadrature spectrally accurate despite the kink of K on x = y.
std::vector<Complex> kernel_power_traces(const Potential& p, Complex lambda, int terms, int m = 96, int threads = 1);

struct DeterminantResult {
  Complex lambda;
  Complex log_d;
  std::vector<Complex> terms;  // Tr K^k / k
  double epsilon = 0.0;        // ||q||_2^2 / Im lambda
  double tail_bound = 0.0;     // epsilon^{N+1} / ((N+1)(1 - epsilon))
  bool in_default_region = true;

  Complex determinant() const { return std::exp(log_d); }
};

double determinant_epsilon(const Potential& p, Complex lambda);
double determinant_tail_bound(double epsilon, int terms);

/// Default operating region: Im lambda >= region_factor * ||q||_2^2.
inline constexpr double kDefaultRegionFactor = 1.2;

/// log D = -sum_{k<=N} Tr K^k / k. Throws std::domain_error outside epsilon < 1.
/// With terms = kAutoTerms the smallest N with tail_bound < 1e-13 is used (capped at 200).
DeterminantResult log_det(const Potential& p, Complex lambda, int terms = kAutoTerms, int m = 96, int threads = 1);

struct DeterminantCheck {
  Complex lambda;
  Complex a;
  Complex d;
  double residual = 0.0;
  double tail_bound = 0.0;
  double quadrature_tol = 0.0;  // |D(m) - D(2m)|
  double bound = 0.0;
  double epsilon = 0.0;
  int terms = 0;
  bool in_default_region = true;
  bool pass = false;
};

std::vector<DeterminantCheck> verify_a_equals_d(const Potential& p, const std::vector<Complex>& lambdas, int m = 96,
                                                int threads = 1);

}  // namespace zsres
