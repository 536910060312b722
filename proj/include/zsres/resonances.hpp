#pragma once

#include <stdexcept>
#include <vector>

#include "zsres/potential.hpp"
#include "zsres/types.hpp"

namespace zsres {

struct ContourBox {
  double re_min = 0.0;
  double re_max = 0.0;
  double im_min = 0.0;
  double im_max = 0.0;
  int nodes_per_side = 8;  // Gauss-Legendre order of each contour panel

  double width() const { return re_max - re_min; }
  double height() const { return im_max - im_min; }
  double diagonal() const { return std::hypot(width(), height()); }
  Complex center() const { return {0.5 * (re_min + re_max), 0.5 * (im_min + im_max)}; }
  bool contains(Complex z) const {
    return z.real() >= re_min && z.real() <= re_max && z.imag() >= im_min && z.imag() <= im_max;
  }
};

struct WindingResult {
  Complex raw;           // (1 / 2 pi i) times the contour integral of a'/a
  int count = 0;         // nearest integer to raw
  double residual = 0.0; // |raw - count|
  bool accepted = false; // residual < 0.25 and node doubling stabilized
  int evaluations = 0;
};

class BoxRejected : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument-principle integral with per-side composite Gauss-Legendre panels,
/// doubled until two successive values differ by less than 0.1.
WindingResult winding_number(const Potential& p, const ContourBox& box);

/// Zero count inside box; throws BoxRejected when the residual is >= 0.25.
int count_zeros_in_box(const Potential& p, const ContourBox& box);

struct Resonance {
  Complex location;
  int multiplicity = 1;
  double newton_residual = 0.0;  // |a(location)|
  double cluster_radius = 0.0;
};

struct SearchOptions {
  double tol = 1e-10;
  int threads = 1;
  int max_newton = 60;
  int max_depth = 48;
  double min_box = 1e-7;  // leaves with more zeros below this size are reported as clusters
};

struct BoxRecord {
  ContourBox box;
  int count = 0;
  double residual = 0.0;
};

struct SearchReport {
  std::vector<Resonance> resonances;
  ContourBox region;           // after the clearance nudge
  int total_winding = 0;       // winding of the whole region
  std::vector<BoxRecord> boxes;// every accepted box of the quadtree
  double max_box_residual = 0.0;
  int nudges = 0;
  int multiplicity_sum() const;
};

/// Boxes touching the real axis are capped at this imaginary part.
inline constexpr double kImaginaryCap = -1e-9;

/// Depth A + 1.5 log(R) / gamma for a search of radius R, where A is offset plus
/// max(0, log(2 gamma / ||q||_1)) / gamma.
double auto_search_depth(const Potential& p, double radius, double offset = 1.0);

/// [-R, R] x [-depth, kImaginaryCap]; depth <= 0 selects auto_search_depth.
ContourBox search_region(const Potential& p, double radius, double depth = 0.0, double offset = 1.0);

/// search_region with automatic depth, then lowered in steps of 1.5 until the
/// strip [-R, R] x [floor - 1.5, floor] holds no zeros or the depth reaches
/// max_depth (radius when max_depth <= 0).
ContourBox complete_search_region(const Potential& p, double radius, double offset = 1.0, double max_depth = 0.0);

SearchReport search_resonances(const Potential& p, const ContourBox& region, const SearchOptions& options = {});
std::vector<Resonance> find_resonances(const Potential& p, const ContourBox& region, double tol,
                                       const SearchOptions& options = {});

struct CountingReport {
  std::vector<double> radii;
  std::vector<int> counts;
  double slope_estimate = 0.0;
  double theoretical_slope = 0.0;  // 2 gamma / pi
  double fit_min = 0.0;
  double fit_max = 0.0;
};

/// N(r) by modulus with multiplicity; slope by least squares over the upper
/// half of the radii, or over [fit_min, fit_max] when fit_max > fit_min.
CountingReport counting_report(const Potential& p, const std::vector<Resonance>& resonances,
                               const std::vector<double>& radii, double fit_min = 0.0, double fit_max = 0.0);

struct SectorReport {
  int total = 0;
  /// Reflected angle arg(conj z) within half_width of 0 or of pi.
  double symmetric_fraction = 0.0;
  /// Reflected angle within half_width of 0 or of -pi, read literally; only the right sector can qualify.
  double literal_fraction = 0.0;
};

SectorReport sector_concentration(const std::vector<Resonance>& resonances, double radius, double half_width = 0.3);

struct ForbiddenEntry {
  Complex location;
  double lhs = 0.0;          // |z^2 + (i/2) z ||q||^2|
  double rhs = 0.0;          // C1 exp(-2 gamma Im z)
  bool within = false;       // lhs <= rhs
  bool within_safety = false;// lhs <= 1.5 rhs
  double modulus_bound = 0.0;// C0 exp(-2 gamma Im z)
  bool within_modulus = false;
};

struct ForbiddenDomainReport {
  double c0 = 0.0;  // sup |lambda (a - 1)| on the grid
  double c1 = 0.0;  // sup |lambda^2 (a - 1 + ||q||^2 / (2 i lambda))| on the grid
  double argmax_c1 = 0.0;
  double safety = 1.5;
  std::vector<ForbiddenEntry> entries;
  bool all_within_safety = true;
  bool all_within_modulus = true;
  double max_ratio = 0.0;  // max lhs / (safety * rhs)
  bool informational = false;  // true for potentials without an integrable derivative

  // Log-curve check over resonances with |Re| >= log_curve_min_re.
  double log_curve_min_re = 10.0;
  double log_curve_offset = 0.0;  // A from the five shallowest resonances
  int log_curve_checked = 0;
  int log_curve_violations = 0;
};

ForbiddenDomainReport forbidden_domain_check(const Potential& p, const std::vector<Resonance>& resonances,
                                             const std::vector<double>& real_grid, int threads = 1);

}  // namespace zsres
