#pragma once

#include <iosfwd>

namespace bandit {

/// Entry point of the `bandit` tool. Returns the process exit code:
/// 0 success, 1 configuration error, 2 I/O error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bandit
