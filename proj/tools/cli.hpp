#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace stereo::cli {

constexpr int kOk = 0;
constexpr int kUsageError = 1;
constexpr int kDataError = 2;

/// Runs the command line (args excludes the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace stereo::cli
