#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pcwlab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitArtifact = 3;

// Runs one subcommand. args excludes the program name. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pcwlab::cli
