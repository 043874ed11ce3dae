#pragma once

#include <iosfwd>

namespace dtdob::cli {

enum ExitCode : int { kOk = 0, kFail = 1, kConfigError = 2, kPreconditionError = 3, kInconclusive = 4 };

/// Entry point of the dtdob tool. Writes a short summary to out and diagnostics to err.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dtdob::cli
