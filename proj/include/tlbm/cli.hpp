#pragma once

namespace tlbm {

enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitConfig = 2, kExitRuntime = 3 };

/// Entry point of the command-line tool: simulate | plan | bench | validate.
int run_cli(int argc, char** argv);

}  // namespace tlbm
