#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace errw::cli {

/// Exit codes: 0 every verdict passed, 1 a verdict failed or the run
/// aborted, 2 usage or configuration error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace errw::cli
