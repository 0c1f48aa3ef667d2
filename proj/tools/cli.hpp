#pragma once

#include <iosfwd>

namespace latestop::cli {

// Entry point shared by the executable and the tests. Errors are written to
// `err` as one JSON object; the return value is the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace latestop::cli
