#pragma once

#include "config.hpp"
#include "report.hpp"

namespace ldplab::runner {

// Exit-code contract: 0 all checks pass, 1 error, 2 condition failures.
struct RunResult {
  int exit_code = 0;
  report::ReportBundle bundle;
};

RunResult run(config::ExperimentConfig cfg);

std::string list_models();

const char* version();

}  // namespace ldplab::runner
