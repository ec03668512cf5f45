#pragma once

#include "oc/model.hpp"

#include <string>
#include <vector>

namespace oc::cli {

// Exit codes: 0 success, 1 validation error, 2 numerical error,
// 3 insufficient data.
int dispatch(const std::vector<std::string>& args);
int dispatch(int argc, char** argv);

// Small 1D square-barrier instance (n = 60 interior points) used by the
// `check` subcommand's identity suite.
PhysicsConfig builtin_check_config();

} // namespace oc::cli
