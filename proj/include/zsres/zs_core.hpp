#pragma once

#include <vector>

#include "zsres/potential.hpp"
#include "zsres/types.hpp"

namespace zsres {

struct Spinor2 {
  Complex f1;
  Complex f2;
};

struct Matrix2 {
  Complex m11{1.0, 0.0}, m12{}, m21{}, m22{1.0, 0.0};

  Complex det() const { return m11 * m22 - m12 * m21; }
  double max_abs() const;
  Matrix2 operator*(const Matrix2& o) const;
  Matrix2 operator+(const Matrix2& o) const;
  Matrix2 operator*(Complex s) const;
  Spinor2 operator*(const Spinor2& v) const { return {m11 * v.f1 + m12 * v.f2, m21 * v.f1 + m22 * v.f2}; }
  static Matrix2 zero() { return {Complex{}, Complex{}, Complex{}, Complex{}}; }
};

/// Propagator M with f(x1) = M f(x0), stored as mantissa * exp(log_scale).
struct TransferMatrix {
  Matrix2 mantissa;
  double log_scale = 0.0;

  /// Unscaled matrix; throws std::overflow_error when it does not fit.
  Matrix2 value() const;
  /// |det M - 1| measured relative to the squared scale.
  double det_residual() const;
};

/// exp(h A) for A = [[i lambda, -i c], [i conj(c), -i lambda]] and its lambda
/// derivative, both multiplied by exp(-log_scale).
struct PieceExponential {
  Matrix2 e;
  Matrix2 de;
  double log_scale = 0.0;
};

PieceExponential piece_exponential(Complex c, Complex lambda, double h);

TransferMatrix transfer(const Potential& p, Complex lambda, double x0, double x1);

struct ScatteringCoefficients {
  Complex a;
  Complex b;
  Complex b_tilde;
  Complex lambda;
  double wronskian_residual = 0.0;
};

ScatteringCoefficients scattering_coefficients(const Potential& p, Complex lambda);

/// a(lambda) without recombining the exponent.
ScaledComplex a_scaled(const Potential& p, Complex lambda);
Complex a_value(const Potential& p, Complex lambda);
Complex a_derivative(const Potential& p, Complex lambda);

/// a together with a'(lambda)/a(lambda); the ratio never overflows.
struct LogDerivative {
  ScaledComplex a;
  Complex ratio;
};
LogDerivative a_log_derivative(const Potential& p, Complex lambda);

struct SMatrix {
  Matrix2 s;
  double lambda = 0.0;
  double unitarity_residual = 0.0;
};

SMatrix s_matrix(const Potential& p, double lambda);

/// Height on the imaginary axis where the phase branch is fixed.
double phase_anchor_height(const Potential& p);

/// Continuous arg a along an increasing real grid, normalized so that
/// log a(i eta) -> 0 as eta -> infinity.
std::vector<double> scattering_phase(const Potential& p, const std::vector<double>& grid);

}  // namespace zsres
