#pragma once

#include <iosfwd>
#include <string>

#include "aniflow/config.hpp"
#include "aniflow/solver.hpp"

namespace aniflow {

/// Process exit codes for `run` and `sweep`.
enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitPinchOff = 2, kExitNewton = 3, kExitDegenerate = 4 };

int exit_code_for(StopReason reason);

struct RunOutcome {
  int exit_code = kExitOk;
  StopReason stop = StopReason::Completed;
  std::string message;
  long steps = 0;
  double final_time = 0.0;
};

/// Writes `manifest.yaml`, `diagnostics.csv` and `snap_<step>.csv` to config.output_dir.
/// The manifest is a valid run config; rerunning it reproduces diagnostics.csv exactly.
RunOutcome run_from_config(const RunConfig& config, std::ostream& log);

/// Writes `errors.csv`, `audit.csv` and `decay.csv` to study.output_dir.
int run_sweep(const StudyConfig& study, std::ostream& log);

}  // namespace aniflow
