#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace permprime::cli {

// Parses the argument vector (without the program name), runs the selected
// subcommand, and writes its report to `out` (diagnostics to `err`).
// Returns the process exit code: 0 pass, 1 fail, 2 usage or input error,
// 3 resource-cap error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace permprime::cli
