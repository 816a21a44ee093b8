#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace latent_diversity::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitNumerical = 4;

// Runs the command line (args exclude the program name). Results go to `out`,
// diagnostics to `err`; returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace latent_diversity::cli
