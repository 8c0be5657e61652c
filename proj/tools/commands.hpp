#pragma once

#include <functional>
#include <iosfwd>

#include "run_config.hpp"

namespace iab::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitInfeasible = 2,
  kExitNotConverged = 3,
};

// Each command writes its artifacts under cfg.output_dir and a summary to
// `log`. Library errors propagate; `guarded` maps them to exit codes.
int cmd_run(const RunConfig& cfg, std::ostream& log);
int cmd_sweep(const RunConfig& cfg, std::ostream& log);
int cmd_verify(const RunConfig& cfg, std::ostream& log);

int guarded(const std::function<int()>& command, std::ostream& err);

}  // namespace iab::cli
