#pragma once

#include <ostream>

namespace afp::cli {

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kParameterError = 2,
    kIoError = 3,
};

/// Entry point of the afpinspect tool. JSON results go to `out`, warnings and
/// errors to `err`. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace afp::cli
