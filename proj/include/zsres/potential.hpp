#pragma once

#include <string>
#include <utility>
#include <vector>

#include "zsres/types.hpp"

namespace zsres {

enum class Representation { piecewise_constant, sampled };

/// Compactly supported complex potential on [0, gamma], stored as a piecewise
/// constant function. Sampled potentials keep their samples and are reduced
/// to cells [x_k, x_{k+1}] carrying the mean of the two end samples.
class Potential {
 public:
  Potential(std::vector<double> breakpoints, std::vector<Complex> values, Representation rep,
            std::string label, std::vector<Complex> samples = {});

  double support_end() const { return breakpoints_.back(); }
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<Complex>& values() const { return values_; }
  std::size_t piece_count() const { return values_.size(); }
  double piece_length(std::size_t k) const { return breakpoints_[k + 1] - breakpoints_[k]; }
  Representation representation() const { return representation_; }
  const std::vector<Complex>& samples() const { return samples_; }
  const std::string& label() const { return label_; }

  /// Condition A violations and similar non-fatal problems found at construction.
  const std::vector<std::string>& warnings() const { return warnings_; }

  bool is_zero() const;
  double max_abs() const;

  /// q(x), zero outside [0, gamma). At a breakpoint the right-hand piece wins.
  Complex operator()(double x) const;

 private:
  std::vector<double> breakpoints_;
  std::vector<Complex> values_;
  Representation representation_;
  std::string label_;
  std::vector<Complex> samples_;
  std::vector<std::string> warnings_;
};

struct PotentialNorms {
  double l1 = 0.0;
  double l2 = 0.0;
  double phi0 = 1.0;  // cosh(l1)
};

Potential make_box(Complex c, double gamma);
Potential make_multibox(const std::vector<std::pair<double, Complex>>& pieces);
Potential make_sampled(const std::vector<Complex>& samples, double gamma);

/// q = 0 on [0, gamma]. Violates Condition A on purpose; used for the free system.
Potential make_zero(double gamma);

PotentialNorms norms(const Potential& p);

/// q -> -conj(q).
Potential conjugate_negate(const Potential& p);

/// Stable hex digest of the representation.
std::string fingerprint(const Potential& p);

}  // namespace zsres
