// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <ostream>

#include "cdosr/config.hpp"

namespace cdosr {

enum ExitCode : int {
  kExitOk = 0,
  kExitRuntime = 1,
  kExitConfig = 2,
  kExitDataset = 3,
  kExitWrite = 4,
};

// Runs the configured study, writes its artifact under config.output_dir and
// prints a summary to `out`. Diagnostics go to `err`.
int dispatch(const RunConfig& config, std::ostream& out, std::ostream& err);

// File name of the artifact written for a study kind ("" for report).
std::string artifact_name(StudyKind kind);

}  // namespace cdosr
