#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace coevo {

/// Runs the `coevo` command line. `args` excludes the program name.
/// Returns 0 on success, 1 on usage or engine errors, 2 on internal errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace coevo
