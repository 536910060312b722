#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "zsres/neumann.hpp"
#include "zsres/potential.hpp"
#include "zsres/types.hpp"

namespace zsres {

using Json = nlohmann::ordered_json;

/// One verified identity. pass is always residual <= bound; informational
/// records are reported but never counted as failures.
struct CheckRecord {
  std::string name;
  std::string anchor;
  Json inputs = Json::object();
  double residual = 0.0;
  double bound = 0.0;
  bool pass = false;
  bool informational = false;
  Json details = Json::object();
};

struct VerifyOptions {
  double radius = 200.0;      // resonances with |lambda| <= radius feed the sums
  double depth = 0.0;         // <= 0: auto depth, completed until the strip below is empty
  double depth_offset = 1.0;
  double tol = 1e-10;
  int threads = 1;
  std::map<std::string, double> tolerances;   // bound overrides by check name
  std::vector<Complex> determinant_lambdas;   // empty: scaled default set
  int determinant_terms = kAutoTerms;
  int determinant_m = 96;
  double q0_window = 400.0;
};

/// All check names in report order.
const std::vector<std::string>& identity_names();

/// Throws std::invalid_argument naming the first unknown check.
std::vector<CheckRecord> run_verification(const Potential& p, const std::vector<std::string>& names,
                                          const VerifyOptions& options);

Json record_json(const CheckRecord& r);
Json report_json(const Potential& p, const std::vector<CheckRecord>& records);

/// Non-informational failures.
int count_failures(const std::vector<CheckRecord>& records);

}  // namespace zsres
