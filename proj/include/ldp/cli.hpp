#pragma once

#include <string>
#include <vector>

namespace ldp::cli {

/// Runs one subcommand: validate, hamiltonian-scan, lagrangian-scan, gamma-region,
/// effective-coeffs, rate, flow, simulate or ldp-verify. Returns the process exit status.
int run(int argc, const char* const* argv);
/// Same, with args not including the program name.
int run(const std::vector<std::string>& args);

}  // namespace ldp::cli
