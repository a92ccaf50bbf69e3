#pragma once

#include <string>
#include <vector>

// Command-line front end. Subcommands: design, simulate, plot, verify.
// Exit codes: 0 success, 2 validation failure, 3 solver failure, 4 IO
// failure, 1 anything else.
namespace plqr {

int run_cli(const std::vector<std::string>& args);

}  // namespace plqr
