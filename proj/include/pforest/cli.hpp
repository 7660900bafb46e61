#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace pforest::cli {

inline constexpr int kOk = 0;
inline constexpr int kInvalid = 1;
inline constexpr int kCriterionFailed = 2;

/// Runs one command line (args exclude the program name). Returns 0 on
/// success, 1 on bad input and 2 when an experiment criterion failed.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pforest::cli
