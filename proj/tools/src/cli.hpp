#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tvpdr::cli {

enum ExitCode : int {
  ok = 0,
  failure = 1,
  usage = 2,
};

/// Runs the command line `args` (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Worker cap from TVPDR_THREADS, defaulting to the hardware concurrency.
std::size_t worker_threads();

}  // namespace tvpdr::cli
