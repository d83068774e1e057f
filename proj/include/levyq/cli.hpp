#pragma once

#include <string>
#include <vector>

namespace levyq::cli {

/// Entry point shared by the binary and the test harness.
/// Exit codes: 0 success, 1 input/validation failure, 2 numerical failure.
int run(const std::vector<std::string>& args);

} // namespace levyq::cli
