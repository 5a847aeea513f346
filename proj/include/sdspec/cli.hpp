#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace sdspec {

enum ExitCode : int {
  exit_ok = 0,
  exit_config_error = 1,
  exit_diverged = 2,
  exit_invariant_failed = 3,
};

/// Entry point of the sdspec command line. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sdspec
