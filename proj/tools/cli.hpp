#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sigkit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitInternal = 3;

/// Runs the command line (without the program name). Output goes to `out`,
/// diagnostics to `err`. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sigkit::cli
