#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace sarfusion::io {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitIo = 3,
  kExitNumerical = 4,
};

/// Entry point of the `sarfuse` tool. `args` excludes the program name.
/// Commands: fuse, train-dict, evaluate, baseline.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sarfusion::io
