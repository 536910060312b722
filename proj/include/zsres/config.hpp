#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "zsres/neumann.hpp"
#include "zsres/potential.hpp"
#include "zsres/types.hpp"

namespace zsres {

/// Malformed or inconsistent configuration. The message names the line and
/// column for syntax errors and the dotted key path for content errors.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ResonanceSettings {
  double re_max = 40.0;
  double depth = 0.0;  // <= 0: automatic
  double depth_offset = 1.0;
  double tol = 1e-10;
  std::vector<double> radii;  // counting radii; empty: 100 equal steps up to re_max
};

struct VerifySettings {
  std::vector<std::string> identities;  // empty: every identity
  std::map<std::string, double> tolerances;
  double radius = 200.0;
  double depth = 0.0;
  double q0_window = 400.0;
};

struct ScatteringSettings {
  double lambda_min = -20.0;
  double lambda_max = 20.0;
  int n_points = 401;
};

struct DeterminantSettings {
  std::vector<Complex> lambdas;  // empty: scaled default set
  int terms = kAutoTerms;
  int m = 96;
};

struct RunConfig {
  std::optional<Potential> potential;
  ResonanceSettings resonances;
  VerifySettings verify;
  ScatteringSettings scattering;
  DeterminantSettings determinant;
  std::filesystem::path output_dir = ".";
  std::vector<std::string> formats{"csv", "json"};
  int threads = 1;

  bool writes(const std::string& format) const;
};

/// Parses JSON text; relative sample paths resolve against base_dir.
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = ".");
RunConfig load_config(const std::filesystem::path& path);

/// ZS_OUTPUT_DIR and ZS_THREADS, when set, replace the configured values.
void apply_environment(RunConfig& config);

/// Reads a CSV with columns x, re, im on a uniform grid starting at 0.
Potential load_samples_csv(const std::filesystem::path& path, std::optional<double> gamma);

}  // namespace zsres
