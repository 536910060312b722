#include "zsres/potential.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace zsres {
namespace {

void check_condition_a(const std::vector<Complex>& values, std::vector<std::string>& warnings) {
  const bool all_zero = std::all_of(values.begin(), values.end(), [](Complex c) { return c == Complex{}; });
  if (all_zero) {
    warnings.emplace_back("potential vanishes identically (Condition A violated)");
    return;
  }
  if (values.front() == Complex{})
    warnings.emplace_back("first piece is zero: support hull does not start at 0 (Condition A violated)");
  if (values.back() == Complex{})
    warnings.emplace_back("last piece is zero: support hull ends before gamma (Condition A violated)");
}

}  // namespace

Potential::Potential(std::vector<double> breakpoints, std::vector<Complex> values, Representation rep,
                     std::string label, std::vector<Complex> samples)
    : breakpoints_(std::move(breakpoints)),
      values_(std::move(values)),
      representation_(rep),
      label_(std::move(label)),
      samples_(std::move(samples)) {
  if (values_.empty() || breakpoints_.size() != values_.size() + 1)
    throw std::invalid_argument("potential needs m pieces and m+1 breakpoints");
  if (breakpoints_.front() != 0.0) throw std::invalid_argument("support must start at 0");
  for (std::size_t k = 0; k + 1 < breakpoints_.size(); ++k) {
    if (!(breakpoints_[k + 1] > breakpoints_[k]) || !std::isfinite(breakpoints_[k + 1]))
      throw std::invalid_argument("breakpoints must be finite and strictly increasing");
  }
  for (Complex c : values_) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
      throw std::invalid_argument("potential values must be finite");
  }
  check_condition_a(values_, warnings_);
}

bool Potential::is_zero() const {
  return std::all_of(values_.begin(), values_.end(), [](Complex c) { return c == Complex{}; });
}

double Potential::max_abs() const {
  double m = 0.0;
  for (Complex c : values_) m = std::max(m, std::abs(c));
  return m;
}

Complex Potential::operator()(double x) const {
  if (x < 0.0 || x >= support_end()) return {};
  const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
  return values_[static_cast<std::size_t>(it - breakpoints_.begin()) - 1];
}

Potential make_box(Complex c, double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw std::invalid_argument("box: gamma must be positive");
  if (c == Complex{}) throw std::invalid_argument("box: value must be nonzero (support hull would be empty)");
  std::ostringstream label;
  label << "box(" << c.real() << (c.imag() < 0 ? "" : "+") << c.imag() << "i, " << gamma << ")";
  return Potential({0.0, gamma}, {c}, Representation::piecewise_constant, label.str());
}

Potential make_multibox(const std::vector<std::pair<double, Complex>>& pieces) {
  if (pieces.empty()) throw std::invalid_argument("multibox: at least one piece required");
  std::vector<double> breaks{0.0};
  std::vector<Complex> values;
  for (const auto& [length, value] : pieces) {
    if (!(length > 0.0)) throw std::invalid_argument("multibox: piece lengths must be positive");
    breaks.push_back(breaks.back() + length);
    values.push_back(value);
  }
  return Potential(std::move(breaks), std::move(values), Representation::piecewise_constant,
                   "multibox(" + std::to_string(pieces.size()) + " pieces)");
}

Potential make_sampled(const std::vector<Complex>& samples, double gamma) {
  if (samples.size() < 2) throw std::invalid_argument("sampled: at least two samples required");
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw std::invalid_argument("sampled: gamma must be positive");
  const std::size_t cells = samples.size() - 1;
  std::vector<double> breaks(cells + 1);
  std::vector<Complex> values(cells);
  for (std::size_t k = 0; k <= cells; ++k) breaks[k] = gamma * static_cast<double>(k) / cells;
  breaks.back() = gamma;
  for (std::size_t k = 0; k < cells; ++k) values[k] = 0.5 * (samples[k] + samples[k + 1]);
  return Potential(std::move(breaks), std::move(values), Representation::sampled,
                   "sampled(" + std::to_string(samples.size()) + " samples)", samples);
}

Potential make_zero(double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("zero potential: gamma must be positive");
  return Potential({0.0, gamma}, {Complex{}}, Representation::piecewise_constant, "zero");
}

PotentialNorms norms(const Potential& p) {
  PotentialNorms n;
  double l2sq = 0.0;
  for (std::size_t k = 0; k < p.piece_count(); ++k) {
    const double a = std::abs(p.values()[k]);
    const double h = p.piece_length(k);
    n.l1 += a * h;
    l2sq += a * a * h;
  }
  n.l2 = std::sqrt(l2sq);
  n.phi0 = std::cosh(n.l1);
  return n;
}

Potential conjugate_negate(const Potential& p) {
  std::vector<Complex> values(p.values());
  for (Complex& c : values) c = -std::conj(c);
  std::vector<Complex> samples(p.samples());
  for (Complex& c : samples) c = -std::conj(c);
  return Potential(p.breakpoints(), std::move(values), p.representation(), "conj-neg " + p.label(),
                   std::move(samples));
}

std::string fingerprint(const Potential& p) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const void* data, std::size_t n) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= bytes[i];
      h *= 1099511628211ULL;
    }
  };
  const int rep = static_cast<int>(p.representation());
  mix(&rep, sizeof rep);
  for (double b : p.breakpoints()) mix(&b, sizeof b);
  for (Complex c : p.values()) {
    const double re = c.real(), im = c.imag();
    mix(&re, sizeof re);
    mix(&im, sizeof im);
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace zsres
