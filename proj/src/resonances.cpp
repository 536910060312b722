#include "zsres/resonances.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "zsres/parallel.hpp"
#include "zsres/quadrature.hpp"
#include "zsres/zs_core.hpp"

namespace zsres {
namespace {

constexpr double kAcceptResidual = 0.25;
constexpr double kStableChange = 0.1;
constexpr int kMaxDoublings = 7;
constexpr std::array<double, 6> kSplitShifts{0.0, 0.0037, -0.0071, 0.0113, -0.0149, 0.0193};
constexpr std::array<double, 5> kRegionShifts{0.0, 0.005, 0.01, 0.015, 0.02};

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// Integral of a'/a along the segment from z0 to z1 with `panels` equal panels.
Complex segment_integral(const Potential& p, Complex z0, Complex z1, int panels, int order, int& evaluations,
                         bool& ok) {
  const GaussRule& rule = gauss_legendre(order);
  const Complex dz = (z1 - z0) / static_cast<double>(panels);
  Complex sum{};
  for (int k = 0; k < panels; ++k) {
    const Complex mid = z0 + (k + 0.5) * dz;
    for (int j = 0; j < order; ++j) {
      const Complex z = mid + 0.5 * rule.nodes[j] * dz;
      const Complex r = a_log_derivative(p, z).ratio;
      ++evaluations;
      if (!finite(r)) {
        ok = false;
        return {};
      }
      sum += rule.weights[j] * 0.5 * dz * r;
    }
  }
  return sum;
}

Complex circle_winding(const Potential& p, Complex center, double radius) {
  constexpr int n = 64;
  Complex sum{};
  for (int k = 0; k < n; ++k) {
    const Complex u = std::polar(radius, 2.0 * kPi * k / n);
    sum += a_log_derivative(p, center + u).ratio * u;
  }
  return sum / static_cast<double>(n);
}

struct NewtonResult {
  Complex z;
  double residual = 0.0;
  bool converged = false;
};

NewtonResult newton(const Potential& p, Complex z, int multiplicity, const ContourBox& box, const SearchOptions& opt) {
  NewtonResult best{z, std::numeric_limits<double>::infinity(), false};
  const double eps = std::numeric_limits<double>::epsilon();
  int polish = 0;
  for (int it = 0; it < opt.max_newton; ++it) {
    const LogDerivative ld = a_log_derivative(p, z);
    const double abs_a = ld.a.mantissa == Complex{} ? 0.0 : std::exp(ld.a.log_abs());
    if (abs_a < best.residual) best = {z, abs_a, best.converged};
    if (abs_a == 0.0) {
      best.converged = true;
      break;
    }
    if (abs_a < opt.tol) {
      best.converged = true;
      if (++polish > 2) break;
    }
    if (!finite(ld.ratio) || ld.ratio == Complex{}) break;
    const Complex step = static_cast<double>(multiplicity) / ld.ratio;
    z -= step;
    if (!finite(z) || std::abs(z - box.center()) > 2.0 * box.diagonal() + 1.0) break;
    if (std::abs(step) <= 8.0 * eps * std::max(1.0, std::abs(z))) {
      const double final_a = std::exp(a_log_derivative(p, z).a.log_abs());
      if (final_a < best.residual) best = {z, final_a, best.converged};
      best.converged = true;
      break;
    }
  }
  return best;
}

std::vector<ContourBox> split_box(const ContourBox& b, double shift) {
  const double w = b.width(), h = b.height(), d = b.diagonal();
  const double xs = 0.5 * (b.re_min + b.re_max) + shift * d;
  const double ys = 0.5 * (b.im_min + b.im_max) + 0.7 * shift * d;
  auto make = [&](double r0, double r1, double i0, double i1) {
    ContourBox c = b;
    c.re_min = r0;
    c.re_max = r1;
    c.im_min = i0;
    c.im_max = i1;
    return c;
  };
  if (w > 2.0 * h) return {make(b.re_min, xs, b.im_min, b.im_max), make(xs, b.re_max, b.im_min, b.im_max)};
  if (h > 2.0 * w) return {make(b.re_min, b.re_max, b.im_min, ys), make(b.re_min, b.re_max, ys, b.im_max)};
  return {make(b.re_min, xs, b.im_min, ys), make(xs, b.re_max, b.im_min, ys), make(b.re_min, xs, ys, b.im_max),
          make(xs, b.re_max, ys, b.im_max)};
}

struct WorkItem {
  ContourBox box;
  int count = 0;
  int depth = 0;
};

struct Outcome {
  std::vector<Resonance> found;
  std::vector<WorkItem> children;
  std::vector<BoxRecord> records;
  int nudges = 0;
};

Outcome process(const Potential& p, const WorkItem& item, const SearchOptions& opt) {
  Outcome out;
  if (item.count == 0) return out;
  const ContourBox& box = item.box;
  const bool tiny = box.diagonal() < opt.min_box;
  if (item.count == 1 || tiny) {
    const NewtonResult nr = newton(p, box.center(), item.count, box, opt);
    if (nr.converged && box.contains(nr.z)) {
      const double radius = std::max(10.0 * opt.tol, 1e-6);
      if (tiny && item.count > 1) {
        out.found.push_back({nr.z, item.count, nr.residual, std::max(radius, box.diagonal())});
        return out;
      }
      const Complex w = circle_winding(p, nr.z, radius);
      const int mult = static_cast<int>(std::lround(w.real()));
      if (mult == item.count) {
        out.found.push_back({nr.z, mult, nr.residual, radius});
        return out;
      }
    }
    if (tiny) {
      out.found.push_back({box.center(), item.count, std::exp(a_log_derivative(p, box.center()).a.log_abs()),
                           box.diagonal()});
      return out;
    }
  }
  if (item.depth >= opt.max_depth) throw BoxRejected("resonance search: maximum subdivision depth reached");
  for (std::size_t attempt = 0; attempt < kSplitShifts.size(); ++attempt) {
    const auto kids = split_box(box, kSplitShifts[attempt]);
    std::vector<WindingResult> wr;
    bool good = true;
    int sum = 0;
    for (const auto& k : kids) {
      wr.push_back(winding_number(p, k));
      if (!wr.back().accepted) {
        good = false;
        break;
      }
      sum += wr.back().count;
    }
    if (!good || sum != item.count) continue;
    out.nudges = static_cast<int>(attempt);
    for (std::size_t i = 0; i < kids.size(); ++i) {
      out.records.push_back({kids[i], wr[i].count, wr[i].residual});
      if (wr[i].count > 0) out.children.push_back({kids[i], wr[i].count, item.depth + 1});
    }
    return out;
  }
  throw BoxRejected("resonance search: no admissible subdivision after nudging (zero on a split line?)");
}

}  // namespace

WindingResult winding_number(const Potential& p, const ContourBox& box) {
  if (!(box.re_max > box.re_min) || !(box.im_max > box.im_min))
    throw std::invalid_argument("contour box must have a nonempty interior");
  if (box.nodes_per_side < 2) throw std::invalid_argument("contour box needs at least two nodes per panel");
  const Complex corners[4] = {{box.re_min, box.im_min}, {box.re_max, box.im_min}, {box.re_max, box.im_max},
                              {box.re_min, box.im_max}};
  const double panel = std::min(kPi / (2.0 * p.support_end()), 1.0);
  int base[4];
  for (int s = 0; s < 4; ++s) {
    const double len = std::abs(corners[(s + 1) % 4] - corners[s]);
    base[s] = std::max(2, static_cast<int>(std::ceil(len / panel)));
  }
  WindingResult res;
  Complex prev{};
  for (int level = 0; level <= kMaxDoublings; ++level) {
    bool ok = true;
    Complex total{};
    for (int s = 0; s < 4 && ok; ++s)
      total += segment_integral(p, corners[s], corners[(s + 1) % 4], base[s] << level, box.nodes_per_side,
                                res.evaluations, ok);
    if (!ok) {
      res.raw = Complex(std::numeric_limits<double>::quiet_NaN(), 0.0);
      res.residual = std::numeric_limits<double>::infinity();
      res.accepted = false;
      return res;
    }
    const Complex w = total / (2.0 * kPi * kI);
    if (level > 0 && std::abs(w - prev) < kStableChange && std::lround(w.real()) == std::lround(prev.real())) {
      res.raw = w;
      res.count = static_cast<int>(std::lround(w.real()));
      res.residual = std::abs(w - static_cast<double>(res.count));
      res.accepted = res.residual < kAcceptResidual;
      return res;
    }
    prev = w;
  }
  res.raw = prev;
  res.count = static_cast<int>(std::lround(prev.real()));
  res.residual = std::abs(prev - static_cast<double>(res.count));
  res.accepted = false;
  return res;
}

int count_zeros_in_box(const Potential& p, const ContourBox& box) {
  const WindingResult w = winding_number(p, box);
  if (!w.accepted) throw BoxRejected("argument-principle residual too large; zero near the contour");
  return w.count;
}

int SearchReport::multiplicity_sum() const {
  int s = 0;
  for (const auto& r : resonances) s += r.multiplicity;
  return s;
}

double auto_search_depth(const Potential& p, double radius, double offset) {
  const double gamma = p.support_end();
  // Weak potentials push the strings down by log(2 gamma / ||q||_1) / gamma.
  const double l1 = norms(p).l1;
  const double weak = l1 > 0.0 ? std::max(0.0, std::log(2.0 * gamma / l1)) / gamma : 0.0;
  return offset + weak + 1.5 * std::log(std::max(radius, 1.0)) / gamma;
}

ContourBox search_region(const Potential& p, double radius, double depth, double offset) {
  if (!(radius > 0.0)) throw std::invalid_argument("search radius must be positive");
  ContourBox b;
  b.re_min = -radius;
  b.re_max = radius;
  b.im_min = -(depth > 0.0 ? depth : auto_search_depth(p, radius, offset));
  b.im_max = kImaginaryCap;
  return b;
}

ContourBox complete_search_region(const Potential& p, double radius, double offset, double max_depth) {
  ContourBox region = search_region(p, radius, 0.0, offset);
  if (p.is_zero()) return region;
  const double limit = max_depth > 0.0 ? max_depth : radius;
  constexpr double kStrip = 1.5;
  while (-region.im_min < limit) {
    int count = -1;
    for (double s : kRegionShifts) {
      const double top = region.im_min - 10.0 * s;
      ContourBox strip = region;
      strip.im_max = top;
      strip.im_min = top - kStrip;
      try {
        count = count_zeros_in_box(p, strip);
      } catch (const BoxRejected&) {
        continue;
      }
      region.im_min = count == 0 ? top : strip.im_min;
      break;
    }
    if (count < 0) throw BoxRejected("no clean strip below the search region");
    if (count == 0) break;
  }
  return region;
}

SearchReport search_resonances(const Potential& p, const ContourBox& region, const SearchOptions& options) {
  SearchReport report;
  ContourBox root = region;
  root.im_max = std::min(root.im_max, kImaginaryCap);
  if (!(root.re_max > root.re_min) || !(root.im_max > root.im_min))
    throw std::invalid_argument("search region must lie below the real axis with a nonempty interior");

  WindingResult top;
  bool found_root = false;
  for (std::size_t i = 0; i < kRegionShifts.size(); ++i) {
    ContourBox b = root;
    const double d = kRegionShifts[i] * root.diagonal();
    b.re_min -= d;
    b.re_max += d;
    b.im_min -= d;
    top = winding_number(p, b);
    if (top.accepted) {
      root = b;
      report.nudges += static_cast<int>(i > 0);
      found_root = true;
      break;
    }
  }
  if (!found_root) throw BoxRejected("resonance search: region boundary passes too close to a zero");
  report.region = root;
  report.total_winding = top.count;
  report.boxes.push_back({root, top.count, top.residual});

  std::vector<WorkItem> level{{root, top.count, 0}};
  while (!level.empty()) {
    std::vector<Outcome> outcomes(level.size());
    parallel_for(level.size(), options.threads, [&](std::size_t i) { outcomes[i] = process(p, level[i], options); });
    std::vector<WorkItem> next;
    for (auto& o : outcomes) {
      report.resonances.insert(report.resonances.end(), o.found.begin(), o.found.end());
      report.boxes.insert(report.boxes.end(), o.records.begin(), o.records.end());
      next.insert(next.end(), o.children.begin(), o.children.end());
      report.nudges += o.nudges;
    }
    level = std::move(next);
  }

  auto& rs = report.resonances;
  std::sort(rs.begin(), rs.end(), [](const Resonance& a, const Resonance& b) {
    return a.location.real() != b.location.real() ? a.location.real() < b.location.real()
                                                  : a.location.imag() < b.location.imag();
  });
  std::vector<Resonance> unique;
  for (const auto& r : rs) {
    const bool dup = std::any_of(unique.begin(), unique.end(), [&](const Resonance& u) {
      return std::abs(u.location - r.location) < std::max(u.cluster_radius, r.cluster_radius);
    });
    if (!dup) unique.push_back(r);
  }
  rs = std::move(unique);
  for (const auto& b : report.boxes) report.max_box_residual = std::max(report.max_box_residual, b.residual);
  return report;
}

std::vector<Resonance> find_resonances(const Potential& p, const ContourBox& region, double tol,
                                       const SearchOptions& options) {
  SearchOptions opt = options;
  opt.tol = tol;
  return search_resonances(p, region, opt).resonances;
}

CountingReport counting_report(const Potential& p, const std::vector<Resonance>& resonances,
                               const std::vector<double>& radii, double fit_min, double fit_max) {
  CountingReport r;
  r.radii = radii;
  std::sort(r.radii.begin(), r.radii.end());
  r.theoretical_slope = 2.0 * p.support_end() / kPi;
  for (double rad : r.radii) {
    int n = 0;
    for (const auto& z : resonances)
      if (std::abs(z.location) <= rad) n += z.multiplicity;
    r.counts.push_back(n);
  }
  if (r.radii.empty()) return r;
  if (fit_max > fit_min) {
    r.fit_min = fit_min;
    r.fit_max = fit_max;
  } else {
    r.fit_min = r.radii[r.radii.size() / 2];
    r.fit_max = r.radii.back();
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < r.radii.size(); ++i) {
    const double x = r.radii[i];
    if (x < r.fit_min || x > r.fit_max) continue;
    sx += x;
    sy += r.counts[i];
    sxx += x * x;
    sxy += x * r.counts[i];
    ++n;
  }
  const double den = n * sxx - sx * sx;
  r.slope_estimate = (n >= 2 && den > 0.0) ? (n * sxy - sx * sy) / den : 0.0;
  return r;
}

SectorReport sector_concentration(const std::vector<Resonance>& resonances, double radius, double half_width) {
  SectorReport s;
  int sym = 0, lit = 0;
  for (const auto& r : resonances) {
    if (std::abs(r.location) > radius) continue;
    const double theta = std::arg(std::conj(r.location));
    s.total += r.multiplicity;
    if (std::abs(theta) < half_width || std::abs(theta - kPi) < half_width) sym += r.multiplicity;
    if (std::abs(theta) < half_width || std::abs(theta + kPi) < half_width) lit += r.multiplicity;
  }
  if (s.total > 0) {
    s.symmetric_fraction = static_cast<double>(sym) / s.total;
    s.literal_fraction = static_cast<double>(lit) / s.total;
  }
  return s;
}

ForbiddenDomainReport forbidden_domain_check(const Potential& p, const std::vector<Resonance>& resonances,
                                             const std::vector<double>& real_grid, int threads) {
  ForbiddenDomainReport rep;
  rep.informational = p.representation() != Representation::sampled;
  const double l2 = norms(p).l2;
  const double q2 = l2 * l2;
  const double gamma = p.support_end();
  std::vector<double> v0(real_grid.size(), 0.0), v1(real_grid.size(), 0.0);
  parallel_for(real_grid.size(), threads, [&](std::size_t i) {
    const double lambda = real_grid[i];
    if (lambda == 0.0) return;
    const Complex a = a_value(p, lambda);
    v0[i] = std::abs(lambda * (a - 1.0));
    v1[i] = std::abs(lambda * lambda * (a - 1.0 + q2 / (2.0 * kI * lambda)));
  });
  for (std::size_t i = 0; i < real_grid.size(); ++i) {
    rep.c0 = std::max(rep.c0, v0[i]);
    if (v1[i] > rep.c1) {
      rep.c1 = v1[i];
      rep.argmax_c1 = real_grid[i];
    }
  }
  for (const auto& r : resonances) {
    const Complex z = r.location;
    ForbiddenEntry e;
    e.location = z;
    e.lhs = std::abs(z * z + 0.5 * kI * z * q2);
    const double grow = std::exp(-2.0 * gamma * z.imag());
    e.rhs = rep.c1 * grow;
    e.within = e.lhs <= e.rhs;
    e.within_safety = e.lhs <= rep.safety * e.rhs;
    e.modulus_bound = rep.c0 * grow;
    e.within_modulus = std::abs(z) <= e.modulus_bound;
    rep.all_within_safety = rep.all_within_safety && e.within_safety;
    rep.all_within_modulus = rep.all_within_modulus && e.within_modulus;
    rep.max_ratio = std::max(rep.max_ratio, e.lhs / (rep.safety * e.rhs));
    rep.entries.push_back(e);
  }

  std::vector<Complex> far;
  for (const auto& r : resonances)
    if (std::abs(r.location.real()) >= rep.log_curve_min_re) far.push_back(r.location);
  std::sort(far.begin(), far.end(), [](Complex a, Complex b) { return a.imag() > b.imag(); });
  if (!far.empty()) {
    double a_fit = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < std::min<std::size_t>(5, far.size()); ++i)
      a_fit = std::max(a_fit, far[i].imag() + std::log(std::abs(far[i].real())) / gamma);
    rep.log_curve_offset = a_fit;
    for (Complex z : far) {
      ++rep.log_curve_checked;
      if (z.imag() > -std::log(std::abs(z.real())) / gamma + a_fit + 1e-12) ++rep.log_curve_violations;
    }
  }
  return rep;
}

}  // namespace zsres
