#pragma once

namespace nflow {

enum ExitCode : int {
    kExitOk = 0,
    kExitViolation = 1,
    kExitConfig = 2,
    kExitRuntime = 3,
};

/// Entry point of the `nflow` tool.
int run_cli(int argc, char** argv);

}  // namespace nflow
