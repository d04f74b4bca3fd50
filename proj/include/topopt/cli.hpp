#pragma once

#include <string>
#include <vector>

namespace topopt {

// Command-line runner. Exit codes: 0 converged, 2 iteration cap reached
// (artifacts still written), 1 configuration or solve error (message on
// stderr).
int run_cli(const std::vector<std::string>& args);

}  // namespace topopt
