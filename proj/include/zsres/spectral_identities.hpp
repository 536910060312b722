#pragma once

#include <vector>

#include "zsres/potential.hpp"
#include "zsres/resonances.hpp"
#include "zsres/types.hpp"

namespace zsres {

/// A sum or product over the resonances with |lambda_n| <= radius, multiplicities expanded.
struct TruncatedSum {
  Complex value;
  double radius = 0.0;
  int n_terms = 0;
};

/// a(0) exp(i gamma lambda) prod_{|lambda_n| <= R} (1 - lambda / lambda_n).
/// Throws std::domain_error if a(0) = 0, which cannot happen for |a| >= 1 on the real axis.
TruncatedSum hadamard_eval(const Potential& p, const std::vector<Resonance>& resonances, Complex lambda, double radius);

/// (1/pi) sum Im lambda_n / |lambda - lambda_n|^2 over |lambda_n| <= R. Real part carries the value; it is <= 0.
TruncatedSum breit_wigner_density(const std::vector<Resonance>& resonances, double lambda, double radius);

/// gamma + pi * breit_wigner_density: the resonance expansion of d(arg a)/d lambda.
double phase_derivative_expansion(const Potential& p, const std::vector<Resonance>& resonances, double lambda,
                                  double radius);

/// Centered difference of the anchored scattering phase.
double phase_derivative_fd(const Potential& p, double lambda, double h = 1e-3);

/// Model |Im lambda_n| ~ intercept + slope * log|lambda_n| fitted on R/2 <= |lambda_n| <= R,
/// with zeros per unit modulus max(2 gamma / pi, observed).
struct TailModel {
  double intercept = 0.0;
  double slope = 0.0;
  double density = 0.0;
  int fitted = 0;
};

TailModel fit_tail_model(const Potential& p, const std::vector<Resonance>& resonances, double radius);

/// Model value of sum_{|lambda_n| > R} |Im lambda_n| / (|lambda_n| - s)^2 for 0 <= s < R.
double model_tail_sum(const TailModel& m, double radius, double s);

inline constexpr double kTailSafety = 1.25;

/// Bound on what the resonances beyond R contribute to phase_derivative_expansion at lambda.
double breit_wigner_tail(const Potential& p, const std::vector<Resonance>& resonances, double lambda, double radius);

/// Estimated |hadamard / a - 1| caused by truncating at R.
double hadamard_tail(const Potential& p, const std::vector<Resonance>& resonances, Complex lambda, double radius);

struct ResolventTraceComparison {
  TruncatedSum sum;     // -i gamma - sum 1 / (lambda - lambda_n)
  Complex direct;       // -a'(lambda) / a(lambda)
  double difference = 0.0;
  double tail_estimate = 0.0;
};

/// Requires distance >= 0.1 from every included resonance.
ResolventTraceComparison resolvent_trace_sum(const Potential& p, const std::vector<Resonance>& resonances,
                                             Complex lambda, double radius);

/// sum_{|lambda_n| <= R} |Im lambda_n| / |lambda_n|^2.
double imaginary_weight_sum(const std::vector<Resonance>& resonances, double radius);

struct Q0Report {
  double window = 0.0;
  double integral = 0.0;  // (1/pi) int_{-W}^{W} log|a|
  double tail = 0.0;      // analytic correction for |lambda| > W
  double total = 0.0;
  double target = 0.0;    // ||q||_2^2 / 2
  double relative_error = 0.0;
  int evaluations = 0;
};

Q0Report q0_action_check(const Potential& p, double window, double panel_width = 0.5, int order = 8, int threads = 1);

struct HighEnergyReport {
  std::vector<double> etas;
  std::vector<Complex> deviations;     // a(i eta) - 1 - ||q||^2 / (2 eta)
  std::vector<double> scaled_second;   // eta^2 |deviation|
  std::vector<double> scaled_first;    // eta |deviation|
  std::vector<double> ratios;          // scaled_second[k+1] / scaled_second[k]
  double max_ratio = 0.0;
};

/// Requires increasing etas, each >= 5 ||q||_2^2.
HighEnergyReport high_energy_check(const Potential& p, const std::vector<double>& etas);

}  // namespace zsres
