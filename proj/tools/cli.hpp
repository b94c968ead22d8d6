#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rbcm::cli {

// Exit codes.
inline constexpr int kTrue = 0;
inline constexpr int kFalse = 1;
inline constexpr int kUsage = 2;
inline constexpr int kPrecondition = 3;
inline constexpr int kParse = 4;

/// Runs one command line (without the program name).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

std::vector<std::string> op_names();

} // namespace rbcm::cli
