#ifndef GIFTSMITH_CLI_HPP
#define GIFTSMITH_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace giftsmith::cli {

enum ExitCode : int {
    kSuccess = 0,
    kDiagnostics = 1, // errors reported for some input; the rest was processed
    kFailure = 2,     // I/O, unknown course, bad arguments
};

/// Runs one invocation. `args` excludes the program name. Data goes to
/// `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace giftsmith::cli

#endif
