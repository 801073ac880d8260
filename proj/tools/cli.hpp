#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cwsk::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;
inline constexpr int kDataError = 2;
inline constexpr int kNumericError = 3;

// Runs one subcommand (gram, sketch, encode, simulate, train, eval). "-" as
// a path means `in` / `out` where streaming is supported. Diagnostics go to
// `err` as a single line.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

}  // namespace cwsk::cli
