#include "zsres/commands.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "zsres/determinant.hpp"
#include "zsres/parallel.hpp"
#include "zsres/resonances.hpp"
#include "zsres/verification.hpp"
#include "zsres/zs_core.hpp"

namespace zsres {
namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::string& header) : out_(path) {
    if (!out_) throw std::runtime_error("cannot write '" + path.string() + "'");
    out_ << header << '\n';
  }
  CsvWriter& operator<<(double v) { return field(num(v)); }
  CsvWriter& operator<<(int v) { return field(std::to_string(v)); }
  void end() {
    out_ << '\n';
    first_ = true;
  }

 private:
  CsvWriter& field(const std::string& s) {
    if (!first_) out_ << ',';
    out_ << s;
    first_ = false;
    return *this;
  }
  std::ofstream out_;
  bool first_ = true;
};

void write_json(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

std::filesystem::path prepare_output(const RunConfig& c) {
  std::filesystem::create_directories(c.output_dir);
  return c.output_dir;
}

Json complex_json(Complex z) { return Json::array({z.real(), z.imag()}); }

std::vector<Complex> default_determinant_lambdas(const Potential& p) {
  const double l2 = norms(p).l2;
  const double base = std::max(3.0, 1.5 * l2 * l2);
  return {Complex(0.0, base), Complex(0.0, base * 5.0 / 3.0), Complex(0.0, base * 10.0 / 3.0),
          Complex(2.0, base * 5.0 / 3.0)};
}

}  // namespace

int cmd_resonances(const RunConfig& config, std::ostream& log) {
  const Potential& p = *config.potential;
  const auto& s = config.resonances;
  const int threads = resolve_threads(config.threads);
  SearchReport rep;
  try {
    const ContourBox region = s.depth > 0.0 ? search_region(p, s.re_max, s.depth, s.depth_offset)
                                            : complete_search_region(p, s.re_max, s.depth_offset);
    SearchOptions opt;
    opt.tol = s.tol;
    opt.threads = threads;
    rep = search_resonances(p, region, opt);
  } catch (const BoxRejected& e) {
    log << "search deadlock: " << e.what() << '\n';
    return kExitFailure;
  }
  const auto dir = prepare_output(config);

  std::vector<double> radii = s.radii;
  if (radii.empty())
    for (int k = 1; k <= 100; ++k) radii.push_back(s.re_max * k / 100.0);
  const CountingReport counting = counting_report(p, rep.resonances, radii);

  std::vector<double> grid;
  for (int i = -4000; i <= 4000; ++i) grid.push_back(0.1 * i);
  const ForbiddenDomainReport fd = forbidden_domain_check(p, rep.resonances, grid, threads);

  if (config.writes("csv")) {
    CsvWriter out(dir / "resonances.csv", "re,im,multiplicity,residual,cluster_radius");
    for (const auto& r : rep.resonances) {
      out << r.location.real() << r.location.imag() << r.multiplicity << r.newton_residual << r.cluster_radius;
      out.end();
    }
    CsvWriter cnt(dir / "counting.csv", "r,N");
    for (std::size_t i = 0; i < counting.radii.size(); ++i) {
      cnt << counting.radii[i] << counting.counts[i];
      cnt.end();
    }
  }
  if (config.writes("json")) {
    Json entries = Json::array();
    for (const auto& e : fd.entries)
      entries.push_back({{"location", complex_json(e.location)},
                         {"lhs", e.lhs},
                         {"rhs", e.rhs},
                         {"within", e.within},
                         {"within_safety", e.within_safety},
                         {"modulus_bound", e.modulus_bound},
                         {"within_modulus", e.within_modulus}});
    write_json(dir / "forbidden_domain.json",
               {{"fingerprint", fingerprint(p)},
                {"c0", fd.c0},
                {"c1", fd.c1},
                {"argmax_c1", fd.argmax_c1},
                {"safety", fd.safety},
                {"informational", fd.informational},
                {"all_within_safety", fd.all_within_safety},
                {"all_within_modulus", fd.all_within_modulus},
                {"max_ratio", fd.max_ratio},
                {"log_curve", {{"min_re", fd.log_curve_min_re},
                               {"offset", fd.log_curve_offset},
                               {"checked", fd.log_curve_checked},
                               {"violations", fd.log_curve_violations}}},
                {"region", {rep.region.re_min, rep.region.re_max, rep.region.im_min, rep.region.im_max}},
                {"total_winding", rep.total_winding},
                {"entries", entries}});
  }
  log << rep.resonances.size() << " resonances (multiplicity sum " << rep.multiplicity_sum() << ", winding "
      << rep.total_winding << ") in [" << rep.region.re_min << ", " << rep.region.re_max << "] x ["
      << rep.region.im_min << ", " << rep.region.im_max << "]\n";
  return rep.multiplicity_sum() == rep.total_winding ? kExitOk : kExitFailure;
}

int cmd_verify(const RunConfig& config, const std::vector<std::string>& only, std::ostream& log) {
  const Potential& p = *config.potential;
  std::vector<std::string> names = !only.empty() ? only : config.verify.identities;
  if (names.empty()) names = identity_names();
  const auto& known = identity_names();
  for (const auto& n : names)
    if (std::find(known.begin(), known.end(), n) == known.end()) {
      log << "unknown identity '" << n << "'\n";
      return kExitUsage;
    }
  VerifyOptions opt;
  opt.radius = config.verify.radius;
  opt.depth = config.verify.depth;
  opt.depth_offset = config.resonances.depth_offset;
  opt.tol = config.resonances.tol;
  opt.threads = resolve_threads(config.threads);
  opt.tolerances = config.verify.tolerances;
  opt.determinant_lambdas = config.determinant.lambdas;
  opt.determinant_terms = config.determinant.terms;
  opt.determinant_m = config.determinant.m;
  opt.q0_window = config.verify.q0_window;
  const auto records = run_verification(p, names, opt);
  const auto dir = prepare_output(config);
  if (config.writes("json")) write_json(dir / "report.json", report_json(p, records));
  for (const auto& r : records)
    log << (r.pass ? "pass " : "FAIL ") << r.name << (r.informational ? " (informational)" : "")
        << " residual=" << r.residual << " bound=" << r.bound << '\n';
  const int failures = count_failures(records);
  log << records.size() << " checks, " << failures << " failed\n";
  return failures == 0 ? kExitOk : kExitFailure;
}

int cmd_scattering(const RunConfig& config, std::ostream& log) {
  const Potential& p = *config.potential;
  const auto& s = config.scattering;
  std::vector<double> grid(s.n_points);
  for (int i = 0; i < s.n_points; ++i)
    grid[i] = s.lambda_min + (s.lambda_max - s.lambda_min) * static_cast<double>(i) / (s.n_points - 1);
  std::vector<ScatteringCoefficients> sc(grid.size());
  parallel_for(grid.size(), resolve_threads(config.threads),
               [&](std::size_t i) { sc[i] = scattering_coefficients(p, grid[i]); });
  const auto phase = scattering_phase(p, grid);
  const auto dir = prepare_output(config);
  if (config.writes("csv")) {
    CsvWriter out(dir / "scattering.csv", "lambda,re_a,im_a,re_b,im_b,norm_difference,phase");
    for (std::size_t i = 0; i < grid.size(); ++i) {
      out << grid[i] << sc[i].a.real() << sc[i].a.imag() << sc[i].b.real() << sc[i].b.imag()
          << std::norm(sc[i].a) - std::norm(sc[i].b) << phase[i];
      out.end();
    }
  }
  log << grid.size() << " scattering points\n";
  return kExitOk;
}

int cmd_determinant(const RunConfig& config, std::ostream& log) {
  const Potential& p = *config.potential;
  const auto& s = config.determinant;
  const std::vector<Complex> lambdas = s.lambdas.empty() ? default_determinant_lambdas(p) : s.lambdas;
  const int threads = resolve_threads(config.threads);
  std::vector<DeterminantResult> results;
  try {
    for (Complex z : lambdas) results.push_back(log_det(p, z, s.terms, s.m, threads));
  } catch (const std::domain_error& e) {
    log << "determinant: " << e.what() << '\n';
    return kExitUsage;
  }
  const auto dir = prepare_output(config);
  if (config.writes("csv")) {
    CsvWriter out(dir / "determinant.csv",
                  "re_lambda,im_lambda,terms,epsilon,re_log_d,im_log_d,tail_bound,abs_d_minus_a,in_default_region");
    CsvWriter terms(dir / "determinant_terms.csv", "re_lambda,im_lambda,k,re_term,im_term");
    for (const auto& r : results) {
      const double diff = std::abs(r.determinant() - a_value(p, r.lambda));
      out << r.lambda.real() << r.lambda.imag() << static_cast<int>(r.terms.size()) << r.epsilon << r.log_d.real()
          << r.log_d.imag() << r.tail_bound << diff << (r.in_default_region ? 1 : 0);
      out.end();
      for (std::size_t k = 0; k < r.terms.size(); ++k) {
        terms << r.lambda.real() << r.lambda.imag() << static_cast<int>(k + 1) << r.terms[k].real()
              << r.terms[k].imag();
        terms.end();
      }
    }
  }
  log << results.size() << " determinant points\n";
  return kExitOk;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Resonances and scattering data of Zakharov-Shabat systems with compactly supported potentials"};
  app.require_subcommand(1);
  std::string config_path, output_dir, only;
  int threads = -1;
  auto add_common = [&](CLI::App* sub, bool with_only) {
    sub->add_option("--config", config_path, "JSON run configuration")->required();
    sub->add_option("--output", output_dir, "Output directory");
    sub->add_option("--threads", threads, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
    if (with_only) sub->add_option("--only", only, "Comma-separated identity names");
  };
  CLI::App* res = app.add_subcommand("resonances", "Locate resonances and write counting data");
  CLI::App* ver = app.add_subcommand("verify", "Run the identity checks and write report.json");
  CLI::App* sca = app.add_subcommand("scattering", "Tabulate a, b and the phase on a real grid");
  CLI::App* det = app.add_subcommand("determinant", "Evaluate the Fredholm determinant series");
  add_common(res, false);
  add_common(ver, true);
  add_common(sca, false);
  add_common(det, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  RunConfig config;
  try {
    config = load_config(config_path);
    apply_environment(config);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitUsage;
  }
  if (!output_dir.empty()) config.output_dir = output_dir;
  if (threads >= 0) config.threads = threads;

  std::vector<std::string> only_names;
  if (!only.empty()) {
    std::stringstream ss(only);
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty()) only_names.push_back(item);
  }

  try {
    if (res->parsed()) return cmd_resonances(config, std::cerr);
    if (ver->parsed()) return cmd_verify(config, only_names, std::cerr);
    if (sca->parsed()) return cmd_scattering(config, std::cerr);
    return cmd_determinant(config, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace zsres
