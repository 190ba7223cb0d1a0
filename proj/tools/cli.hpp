#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kiosk::cli {

enum ExitCode : int {
    kOk = 0,
    kUsage = 1,
    kInvalidInput = 2,
    kIoFailure = 3,
    kPartialFailure = 4,
};

/// Runs `kiosk-sim` with `args` (args[0] is the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kiosk::cli
