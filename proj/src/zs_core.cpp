#include "zsres/zs_core.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace zsres {

double Matrix2::max_abs() const {
  return std::max({std::abs(m11), std::abs(m12), std::abs(m21), std::abs(m22)});
}

Matrix2 Matrix2::operator*(const Matrix2& o) const {
  return {m11 * o.m11 + m12 * o.m21, m11 * o.m12 + m12 * o.m22, m21 * o.m11 + m22 * o.m21,
          m21 * o.m12 + m22 * o.m22};
}

Matrix2 Matrix2::operator+(const Matrix2& o) const {
  return {m11 + o.m11, m12 + o.m12, m21 + o.m21, m22 + o.m22};
}

Matrix2 Matrix2::operator*(Complex s) const { return {m11 * s, m12 * s, m21 * s, m22 * s}; }

Matrix2 TransferMatrix::value() const {
  if (log_scale + std::log(std::max(mantissa.max_abs(), 1e-300)) > kMaxLogMagnitude)
    throw std::overflow_error("transfer matrix exceeds the double range");
  return mantissa * Complex(std::exp(log_scale), 0.0);
}

double TransferMatrix::det_residual() const {
  return std::abs(mantissa.det() - std::exp(-2.0 * log_scale));
}

namespace {

constexpr double kScaleThreshold = 30.0;
constexpr double kSeriesSwitch = 0.5;

struct SeriesTables {
  std::array<double, 8> cos{}, sin{}, dif{};  // (-1)^k/(2k)!, (-1)^k/(2k+1)!, (-1)^(k+1) 2(k+1)/(2k+3)!
};

const SeriesTables& series_tables() {
  static const SeriesTables t = [] {
    SeriesTables s;
    double f = 1.0;  // (2k)!
    for (int k = 0; k < 8; ++k) {
      const double sign = (k % 2) ? -1.0 : 1.0;
      s.cos[k] = sign / f;
      s.sin[k] = sign / (f * (2 * k + 1));
      s.dif[k] = -sign * 2.0 * (k + 1) / (f * (2 * k + 1) * (2 * k + 2) * (2 * k + 3));
      f *= (2 * k + 1) * (2 * k + 2);
    }
    return s;
  }();
  return t;
}

PieceExponential free_piece(Complex lambda, double h) {
  PieceExponential out;
  const double s = std::abs(lambda.imag()) * h;
  out.log_scale = s > kScaleThreshold ? s : 0.0;
  const Complex ep = std::exp(kI * lambda * h - out.log_scale);
  const Complex em = std::exp(-kI * lambda * h - out.log_scale);
  out.e = {ep, Complex{}, Complex{}, em};
  out.de = {kI * h * ep, Complex{}, Complex{}, -kI * h * em};
  return out;
}

}  // namespace

PieceExponential piece_exponential(Complex c, Complex lambda, double h) {
  if (c == Complex{}) return free_piece(lambda, h);
  PieceExponential out;
  const Complex z = lambda * lambda - std::norm(c);
  Complex cc, ss, dd;
  const Complex u = z * (h * h);
  if (std::abs(u) < kSeriesSwitch * kSeriesSwitch) {
    // cos, sin / kappa and (h cos - sin / kappa) / z as power series in u = z h^2.
    const double au = std::abs(u);
    const int n = au < 1e-4 ? 3 : (au < 1e-2 ? 5 : 7);
    const auto& t = series_tables();
    Complex c_sum = t.cos[n], s_sum = t.sin[n], d_sum = t.dif[n - 1];
    for (int k = n - 1; k >= 0; --k) {
      c_sum = c_sum * u + t.cos[k];
      s_sum = s_sum * u + t.sin[k];
    }
    for (int k = n - 2; k >= 0; --k) d_sum = d_sum * u + t.dif[k];
    cc = c_sum;
    ss = h * s_sum;
    dd = (h * h * h) * d_sum;
  } else {
    const Complex kappa = std::sqrt(z);
    const Complex w = kappa * h;
    const double s = std::abs(kappa.imag()) * h;
    out.log_scale = s > kScaleThreshold ? s : 0.0;
    if (out.log_scale == 0.0) {
      cc = std::cos(w);
      ss = std::sin(w) / kappa;
    } else {
      const Complex ep = std::exp(kI * w - out.log_scale);
      const Complex em = std::exp(-kI * w - out.log_scale);
      cc = 0.5 * (ep + em);
      ss = (ep - em) / (2.0 * kI * kappa);
    }
    dd = (h * cc - ss) / z;
  }

  const Matrix2 a{kI * lambda, -kI * c, kI * std::conj(c), -kI * lambda};
  out.e = Matrix2{cc, Complex{}, Complex{}, cc} + a * ss;
  const Complex diag = -h * lambda * ss;
  out.de = Matrix2{diag + kI * ss, Complex{}, Complex{}, diag - kI * ss} + a * (lambda * dd);
  return out;
}

namespace {

struct Propagation {
  Matrix2 m;
  Matrix2 dm = Matrix2::zero();
  double log_scale = 0.0;
};

Propagation propagate(const Potential& p, Complex lambda, double x0, double x1, bool with_derivative) {
  const double gamma = p.support_end();
  if (!(x0 >= 0.0 && x0 <= x1 && x1 <= gamma)) throw std::invalid_argument("transfer: need 0 <= x0 <= x1 <= gamma");
  if (!std::isfinite(lambda.real()) || !std::isfinite(lambda.imag()))
    throw std::invalid_argument("transfer: lambda must be finite");
  Propagation st;
  const auto& br = p.breakpoints();
  for (std::size_t k = 0; k < p.piece_count(); ++k) {
    const double lo = std::max(br[k], x0);
    const double hi = std::min(br[k + 1], x1);
    if (!(hi > lo)) continue;
    const PieceExponential pe = piece_exponential(p.values()[k], lambda, hi - lo);
    if (with_derivative) st.dm = pe.de * st.m + pe.e * st.dm;
    st.m = pe.e * st.m;
    st.log_scale += pe.log_scale;
    const double n = st.m.max_abs();
    if (!(n > 0.0) || !std::isfinite(n)) throw std::overflow_error("propagation lost the double range");
    if (n > 1e50 || n < 1e-50) {
      const double inv = 1.0 / n;
      st.m = st.m * Complex(inv, 0.0);
      st.dm = st.dm * Complex(inv, 0.0);
      st.log_scale += std::log(n);
    }
  }
  return st;
}

// Second column of the propagator over [0, gamma], which is all that a needs.
struct ColumnPropagation {
  Spinor2 v{Complex{}, Complex(1.0, 0.0)};
  Spinor2 dv{};
  double log_scale = 0.0;
};

ColumnPropagation propagate_column(const Potential& p, Complex lambda, bool with_derivative) {
  if (!std::isfinite(lambda.real()) || !std::isfinite(lambda.imag()))
    throw std::invalid_argument("transfer: lambda must be finite");
  ColumnPropagation st;
  for (std::size_t k = 0; k < p.piece_count(); ++k) {
    const PieceExponential pe = piece_exponential(p.values()[k], lambda, p.piece_length(k));
    if (with_derivative) {
      const Spinor2 a = pe.de * st.v, b = pe.e * st.dv;
      st.dv = {a.f1 + b.f1, a.f2 + b.f2};
    }
    st.v = pe.e * st.v;
    st.log_scale += pe.log_scale;
    const double n = std::max(std::abs(st.v.f1), std::abs(st.v.f2));
    if (!(n > 0.0) || !std::isfinite(n)) throw std::overflow_error("propagation lost the double range");
    if (n > 1e50 || n < 1e-50) {
      const double inv = 1.0 / n;
      st.v = {st.v.f1 * inv, st.v.f2 * inv};
      st.dv = {st.dv.f1 * inv, st.dv.f2 * inv};
      st.log_scale += std::log(n);
    }
  }
  return st;
}

ScaledComplex scaled(Complex mantissa, double log_scale) { return ScaledComplex{mantissa, log_scale}; }

}  // namespace

TransferMatrix transfer(const Potential& p, Complex lambda, double x0, double x1) {
  const Propagation st = propagate(p, lambda, x0, x1, false);
  return TransferMatrix{st.m, st.log_scale};
}

ScatteringCoefficients scattering_coefficients(const Potential& p, Complex lambda) {
  const Propagation st = propagate(p, lambda, 0.0, p.support_end(), false);
  const double gamma = p.support_end();
  const Complex phase = std::exp(Complex(0.0, lambda.real() * gamma));
  const double up = st.log_scale - lambda.imag() * gamma;
  const double down = st.log_scale + lambda.imag() * gamma;
  ScatteringCoefficients out;
  out.lambda = lambda;
  out.a = scaled(st.m.m22 * phase, up).value();
  out.b = scaled(st.m.m12 / phase, down).value();
  out.b_tilde = scaled(-st.m.m21 * phase, up).value();
  out.wronskian_residual = std::abs(st.m.det() - std::exp(-2.0 * st.log_scale));
  return out;
}

ScaledComplex a_scaled(const Potential& p, Complex lambda) {
  const ColumnPropagation st = propagate_column(p, lambda, false);
  const double gamma = p.support_end();
  return scaled(st.v.f2 * std::exp(Complex(0.0, lambda.real() * gamma)), st.log_scale - lambda.imag() * gamma);
}

Complex a_value(const Potential& p, Complex lambda) { return a_scaled(p, lambda).value(); }

Complex a_derivative(const Potential& p, Complex lambda) {
  const ColumnPropagation st = propagate_column(p, lambda, true);
  const double gamma = p.support_end();
  const Complex mant = (kI * gamma * st.v.f2 + st.dv.f2) * std::exp(Complex(0.0, lambda.real() * gamma));
  return scaled(mant, st.log_scale - lambda.imag() * gamma).value();
}

LogDerivative a_log_derivative(const Potential& p, Complex lambda) {
  const ColumnPropagation st = propagate_column(p, lambda, true);
  const double gamma = p.support_end();
  LogDerivative out;
  out.a = scaled(st.v.f2 * std::exp(Complex(0.0, lambda.real() * gamma)), st.log_scale - lambda.imag() * gamma);
  out.ratio = kI * gamma + st.dv.f2 / st.v.f2;
  return out;
}

SMatrix s_matrix(const Potential& p, double lambda) {
  const ScatteringCoefficients sc = scattering_coefficients(p, Complex(lambda, 0.0));
  SMatrix out;
  out.lambda = lambda;
  const Complex inv = 1.0 / sc.a;
  out.s = Matrix2{inv, -std::conj(sc.b) * inv, sc.b * inv, inv};
  const Matrix2& s = out.s;
  const Matrix2 sh{std::conj(s.m11), std::conj(s.m21), std::conj(s.m12), std::conj(s.m22)};
  const Matrix2 prod = sh * s;
  out.unitarity_residual = (prod + Matrix2{-1.0, Complex{}, Complex{}, -1.0}).max_abs();
  return out;
}

double phase_anchor_height(const Potential& p) {
  const double l2 = norms(p).l2;
  return std::max(10.0, 10.0 * l2 * l2);
}

namespace {

// Change of arg a along the segment z0 -> z1, refined until each step is small.
double phase_increment(const Potential& p, Complex z0, const ScaledComplex& a0, Complex z1, const ScaledComplex& a1,
                       int depth) {
  const Complex ratio = a1.mantissa / a0.mantissa;
  const Complex step = std::log(ratio) + (a1.log_scale - a0.log_scale);
  if (std::abs(step) < 0.5) return step.imag();
  if (depth > 48) throw std::runtime_error("scattering phase: branch ambiguity, refinement limit reached");
  const Complex mid = 0.5 * (z0 + z1);
  const ScaledComplex am = a_scaled(p, mid);
  return phase_increment(p, z0, a0, mid, am, depth + 1) + phase_increment(p, mid, am, z1, a1, depth + 1);
}

}  // namespace

std::vector<double> scattering_phase(const Potential& p, const std::vector<double>& grid) {
  std::vector<double> out(grid.size());
  if (grid.empty()) return out;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw std::invalid_argument("scattering phase: grid must be increasing");
  }
  const Complex top(0.0, phase_anchor_height(p));
  const ScaledComplex a_top = a_scaled(p, top);
  const double anchor = std::arg(a_top.mantissa);
  Complex z(grid[0], 0.0);
  ScaledComplex az = a_scaled(p, z);
  out[0] = anchor + phase_increment(p, top, a_top, z, az, 0);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const Complex zn(grid[i], 0.0);
    const ScaledComplex an = a_scaled(p, zn);
    out[i] = out[i - 1] + phase_increment(p, z, az, zn, an, 0);
    z = zn;
    az = an;
  }
  return out;
}

}  // namespace zsres
