#pragma once

// Command-line front end: distance | simulate | solve | gap | example.

#include <iosfwd>

namespace impopt::cli {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInfeasible = 2;

/// Runs one command; output goes to `out`, diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace impopt::cli
