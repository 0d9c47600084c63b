#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace grassvol::cli {

enum ExitCode : int { kOk = 0, kInternal = 1, kInvalid = 2, kAccuracy = 3 };

/// Runs the command line `args` (without the program name). Results go to
/// `out` unless --out is given; diagnostics and the run manifest go to `err`
/// unless --manifest is given.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

std::string version();

}  // namespace grassvol::cli
