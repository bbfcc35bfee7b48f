#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace recdiv::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitLimits = 4;

// Bad or missing arguments found after parsing; exits with kExitUsage.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Runs one command line (args excludes the program name) and returns the
// process exit code. Normal output goes to out, diagnostics to err.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace recdiv::cli
