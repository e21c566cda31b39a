#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace csakit {

// Runs one subcommand. Exit codes: 0 success, 1 domain error, 2 usage error.
// Errors print a single line "error: <category>: <message>" to err.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace csakit
