#pragma once

#include <ostream>

namespace bestcell::cli {

enum ExitCode : int {
    kOk = 0,
    kConfigError = 2,
    kConvergenceError = 3,
    kVerificationFailed = 4,
};

/// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bestcell::cli
