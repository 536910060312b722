#include "zsres/spectral_identities.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "zsres/parallel.hpp"
#include "zsres/quadrature.hpp"
#include "zsres/zs_core.hpp"

namespace zsres {

TruncatedSum hadamard_eval(const Potential& p, const std::vector<Resonance>& resonances, Complex lambda, double radius) {
  const Complex a0 = a_value(p, 0.0);
  if (a0 == Complex{}) throw std::domain_error("hadamard: a(0) = 0, the product needs a zero-order prefactor");
  TruncatedSum t;
  t.radius = radius;
  Complex prod = a0 * std::exp(kI * p.support_end() * lambda);
  for (const auto& r : resonances) {
    if (std::abs(r.location) > radius) continue;
    prod *= std::pow(1.0 - lambda / r.location, r.multiplicity);
    t.n_terms += r.multiplicity;
  }
  t.value = prod;
  return t;
}

TruncatedSum breit_wigner_density(const std::vector<Resonance>& resonances, double lambda, double radius) {
  TruncatedSum t;
  t.radius = radius;
  double s = 0.0;
  for (const auto& r : resonances) {
    if (std::abs(r.location) > radius) continue;
    s += r.multiplicity * r.location.imag() / std::norm(lambda - r.location);
    t.n_terms += r.multiplicity;
  }
  t.value = s / kPi;
  return t;
}

double phase_derivative_expansion(const Potential& p, const std::vector<Resonance>& resonances, double lambda,
                                  double radius) {
  return p.support_end() + kPi * breit_wigner_density(resonances, lambda, radius).value.real();
}

double phase_derivative_fd(const Potential& p, double lambda, double h) {
  const auto phi = scattering_phase(p, {lambda - h, lambda + h});
  return (phi[1] - phi[0]) / (2.0 * h);
}

TailModel fit_tail_model(const Potential& p, const std::vector<Resonance>& resonances, double radius) {
  TailModel m;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& r : resonances) {
    const double mod = std::abs(r.location);
    if (mod < 0.5 * radius || mod > radius) continue;
    const double x = std::log(mod), y = std::abs(r.location.imag());
    for (int k = 0; k < r.multiplicity; ++k) {
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++n;
    }
  }
  m.fitted = n;
  const double den = n * sxx - sx * sx;
  if (n >= 3 && den > 1e-12) {
    m.slope = std::max(0.0, (n * sxy - sx * sy) / den);
    m.intercept = (sy - m.slope * sx) / n;
  } else if (n > 0) {
    m.intercept = sy / n;
  }
  // Keep the model above every fitted point.
  for (const auto& r : resonances) {
    const double mod = std::abs(r.location);
    if (mod < 0.5 * radius || mod > radius) continue;
    const double excess = std::abs(r.location.imag()) - (m.intercept + m.slope * std::log(mod));
    m.intercept += std::max(0.0, excess);
  }
  m.density = std::max(2.0 * p.support_end() / kPi, n / (0.5 * radius));
  return m;
}

double model_tail_sum(const TailModel& m, double radius, double s) {
  if (!(s >= 0.0 && s < radius)) throw std::invalid_argument("tail model: need 0 <= s < R");
  const double head = (m.intercept + m.slope * std::log(radius)) / (radius - s);
  const double log_part = s > 0.0 ? -std::log1p(-s / radius) / s : 1.0 / radius;
  return m.density * (head + m.slope * log_part);
}

double breit_wigner_tail(const Potential& p, const std::vector<Resonance>& resonances, double lambda, double radius) {
  const TailModel m = fit_tail_model(p, resonances, radius);
  return kTailSafety * model_tail_sum(m, radius, std::abs(lambda));
}

double hadamard_tail(const Potential& p, const std::vector<Resonance>& resonances, Complex lambda, double radius) {
  const TailModel m = fit_tail_model(p, resonances, radius);
  const double mod = std::abs(lambda);
  const double first = mod * model_tail_sum(m, radius, 0.0);
  const double second = mod * mod * m.density / radius;
  return std::expm1(kTailSafety * (first + second));
}

ResolventTraceComparison resolvent_trace_sum(const Potential& p, const std::vector<Resonance>& resonances,
                                             Complex lambda, double radius) {
  ResolventTraceComparison c;
  c.sum.radius = radius;
  Complex s = -kI * p.support_end();
  for (const auto& r : resonances) {
    if (std::abs(r.location) > radius) continue;
    if (std::abs(lambda - r.location) < 0.1)
      throw std::invalid_argument("resolvent trace: lambda is within 0.1 of a resonance");
    s -= static_cast<double>(r.multiplicity) / (lambda - r.location);
    c.sum.n_terms += r.multiplicity;
  }
  c.sum.value = s;
  c.direct = -a_log_derivative(p, lambda).ratio;
  c.difference = std::abs(c.direct - s);
  const TailModel m = fit_tail_model(p, resonances, radius);
  c.tail_estimate = kTailSafety * (model_tail_sum(m, radius, 0.0) + std::abs(lambda) * m.density / radius);
  return c;
}

double imaginary_weight_sum(const std::vector<Resonance>& resonances, double radius) {
  double s = 0.0;
  for (const auto& r : resonances)
    if (std::abs(r.location) <= radius) s += r.multiplicity * std::abs(r.location.imag()) / std::norm(r.location);
  return s;
}

Q0Report q0_action_check(const Potential& p, double window, double panel_width, int order, int threads) {
  if (!(window > 0.0) || !(panel_width > 0.0)) throw std::invalid_argument("q0 check: window and panel width must be positive");
  Q0Report rep;
  rep.window = window;
  const double l2 = norms(p).l2;
  rep.target = 0.5 * l2 * l2;
  const int panels = std::max(1, static_cast<int>(std::ceil(2.0 * window / panel_width)));
  const double h = 2.0 * window / panels;
  const GaussRule& rule = gauss_legendre(order);
  std::vector<double> partial(panels, 0.0);
  parallel_for(static_cast<std::size_t>(panels), threads, [&](std::size_t k) {
    const double mid = -window + (k + 0.5) * h;
    double s = 0.0;
    for (int j = 0; j < order; ++j) s += rule.weights[j] * a_scaled(p, mid + 0.5 * h * rule.nodes[j]).log_abs();
    partial[k] = 0.5 * h * s;
  });
  double integral = 0.0;
  for (double v : partial) integral += v;
  rep.evaluations = panels * order;
  rep.integral = integral / kPi;
  const double c = rep.target;
  rep.tail = (2.0 * c * std::atan(c / window) - window * std::log1p(c * c / (window * window))) / kPi;
  rep.total = rep.integral + rep.tail;
  rep.relative_error = rep.target > 0.0 ? std::abs(rep.total - rep.target) / rep.target : std::abs(rep.total);
  return rep;
}

HighEnergyReport high_energy_check(const Potential& p, const std::vector<double>& etas) {
  const double l2 = norms(p).l2;
  const double q2 = l2 * l2;
  for (std::size_t i = 0; i < etas.size(); ++i) {
    if (etas[i] < 5.0 * q2) throw std::invalid_argument("high-energy check: eta must be at least 5 ||q||_2^2");
    if (i > 0 && !(etas[i] > etas[i - 1])) throw std::invalid_argument("high-energy check: etas must increase");
  }
  HighEnergyReport rep;
  rep.etas = etas;
  for (double eta : etas) {
    // a(lambda) = 1 - ||q||^2 / (2 i lambda) + ..., which is 1 + ||q||^2 / (2 eta) at lambda = i eta.
    const Complex dev = a_value(p, Complex(0.0, eta)) - 1.0 - q2 / (2.0 * eta);
    rep.deviations.push_back(dev);
    rep.scaled_second.push_back(std::abs(dev) * eta * eta);
    rep.scaled_first.push_back(std::abs(dev) * eta);
  }
  for (std::size_t i = 1; i < etas.size(); ++i) {
    const double r = rep.scaled_second[i - 1] > 0.0 ? rep.scaled_second[i] / rep.scaled_second[i - 1] : 0.0;
    rep.ratios.push_back(r);
    rep.max_ratio = std::max(rep.max_ratio, r);
  }
  return rep;
}

}  // namespace zsres
