#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace polcascade::cli {

enum ExitCode : int {
    kOk = 0,
    kIoError = 1,
    kUsageError = 2,
    kBudgetExceeded = 3,
};

/// Runs one `polcascade` invocation (argv[0] is the program name). The report
/// goes to `out` unless --out / output.path names a file; diagnostics go to `err`.
int run_command(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

int run_command(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace polcascade::cli
