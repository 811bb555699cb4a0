#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace carma_hawkes::cli {

// Exit codes of the command-line front end.
enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kInvalidConfig = 2,
    kValidationFailure = 3,
    kRuntimeAssertion = 4,
};

// Entry point shared by the executable and the tests. `args` excludes the
// program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace carma_hawkes::cli
