#pragma once

#include <string>
#include <vector>

namespace roptd {

/// Entry point behind the roptd binary; exposed for in-process testing.
/// Exit codes: 0 converged/verified, 1 input or I/O error, 2 not converged /
/// not verified.
int run_cli(const std::vector<std::string>& args);

int run_cli(int argc, char** argv);

}  // namespace roptd
