#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hypermoment::cli {

enum ExitCode : int { kOk = 0, kValidationError = 1, kNumericalError = 2 };

// Runs one command. `args` excludes the program name. Data goes to `out`
// (or to the file given by --output), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hypermoment::cli
