#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "sclust/error.hpp"

namespace sclust::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitConfig = 2,
  kExitIo = 3,
  kExitData = 4,
  kExitComputation = 5,
};

int exit_code(ErrorKind kind);

std::string_view version();

/// Runs the command line `args` (without the program name). All normal
/// output goes to `out`, diagnostics to `err`. Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "a:b:step" (inclusive, values rounded to 10 decimals) or "x,y,z".
/// Throws ParameterError on malformed input or non-positive values.
std::vector<double> parse_sigma_grid(std::string_view spec);

/// "a:b" or "a,b,c" list of integers.
std::vector<int> parse_int_list(std::string_view spec);

}  // namespace sclust::cli
