#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace holofib {

/// Command-line driver. args includes the program name. All regular output
/// goes to `out` (valid JSON, or CSV for trajectories), diagnostics to `err`.
/// Returns 0 when all requested checks pass, 1 on a check failure, 2 on
/// usage or IO errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace holofib
