#pragma once

#include <ostream>

namespace thinspec::cli {

enum ExitCode : int {
    kOk = 0,
    kConfigError = 2,
    kNumericalError = 3,
    kSearchError = 4,
};

/// Runs one subcommand. Result files go to --out; a one-line JSON summary
/// goes to `out` and diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace thinspec::cli
