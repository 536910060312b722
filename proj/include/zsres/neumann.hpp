#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "zsres/potential.hpp"
#include "zsres/types.hpp"

namespace zsres {

/// Pass as the term count to pick the smallest count meeting the target remainder.
inline constexpr int kAutoTerms = -1;

struct SeriesResult {
  Complex value;
  int terms_used = 0;
  double remainder_bound = 0.0;
  std::vector<Complex> per_term;  // contribution of term n = 1..N
};

struct NeumannOptions {
  int order = 16;
  std::size_t node_budget = 2'000'000;
  double target_remainder = 1e-10;
  int max_terms = 12;
  double max_exponent = 20.0;  // largest |Im lambda| * gamma accepted
};

class QuadratureBudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tail of the majorant for chi(x): exp(d (|eta| - eta)) * sum_{n>N} L^{2n}/(2n)!,
/// where d = gamma - x and L is the l1 norm of q on [x, gamma].
double chi_remainder(double tail_l1, double distance, Complex lambda, int terms);

/// Tail for b_tilde: exp(gamma (|eta| - eta)) * sum_{n>N} L^{2n+1}/(2n+1)!.
double b_tilde_remainder(double l1, double gamma, Complex lambda, int terms);

SeriesResult chi_series(const Potential& p, double x, Complex lambda, int terms = kAutoTerms,
                        const NeumannOptions& options = {});
SeriesResult a_series(const Potential& p, Complex lambda, int terms = kAutoTerms, const NeumannOptions& options = {});
SeriesResult b_tilde_series(const Potential& p, Complex lambda, int terms = kAutoTerms,
                            const NeumannOptions& options = {});

}  // namespace zsres
