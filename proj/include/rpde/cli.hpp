#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rpde::cli {

enum ExitCode : int {
  kOk = 0,
  kInvalidInput = 2,
  kSolverFailure = 3,
  kIoFailure = 4,
};

// Entry point of the `rpde` tool with subcommands fit, sweep and demo.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// "a:b:step" (inclusive of b) or a comma-separated list.
std::vector<double> parse_h_grid(const std::string& text);

inline const std::vector<std::string> kPresets{"fig4-quick", "fig4-full", "fig3"};

}  // namespace rpde::cli
