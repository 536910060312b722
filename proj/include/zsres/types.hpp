#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

namespace zsres {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr Complex kI{0.0, 1.0};

/// Largest natural-log magnitude that can be recombined into a finite double.
inline constexpr double kMaxLogMagnitude = 700.0;

/// A complex number stored as mantissa * exp(log_scale). Used wherever |a(λ)|
/// can exceed the double range deep in the lower half-plane.
struct ScaledComplex {
  Complex mantissa{1.0, 0.0};
  double log_scale = 0.0;

  double log_abs() const { return std::log(std::abs(mantissa)) + log_scale; }

  Complex value() const {
    if (mantissa == Complex{}) return {};
    if (log_abs() > kMaxLogMagnitude) {
      throw std::overflow_error("scaled value exceeds the double range");
    }
    return mantissa * std::exp(log_scale);
  }
};

}  // namespace zsres
