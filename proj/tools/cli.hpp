#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace jcone::cli {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kSeedEnv = "JCONE_SEED";

enum ExitCode : int { kOk = 0, kFailure = 1, kUsage = 2 };

/// Runs one command line (args[0] is the program name). Reports go to `out`
/// unless --output is given; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace jcone::cli
