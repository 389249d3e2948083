#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace unsolv::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitUsage = 2;

/// Runs one command line (without the program name). Records and tables go to `out`,
/// diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace unsolv::cli
