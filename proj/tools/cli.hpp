#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hsiga::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2 };

/// Runs the command line `args` (without the program name). Data goes to
/// `out` or files, messages to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Parses a band list such as "0-4,48-50,121-127"; "none" is empty.
std::vector<std::size_t> parse_band_list(const std::string& text);

}  // namespace hsiga::cli
