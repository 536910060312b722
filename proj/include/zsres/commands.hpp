#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "zsres/config.hpp"

namespace zsres {

/// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // search deadlock or failed checks
inline constexpr int kExitUsage = 2;    // bad flags or config

int cmd_resonances(const RunConfig& config, std::ostream& log);
int cmd_verify(const RunConfig& config, const std::vector<std::string>& only, std::ostream& log);
int cmd_scattering(const RunConfig& config, std::ostream& log);
int cmd_determinant(const RunConfig& config, std::ostream& log);

/// Full command-line entry point.
int run_cli(int argc, char** argv);

}  // namespace zsres
