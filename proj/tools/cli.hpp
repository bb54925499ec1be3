#pragma once

#include <iosfwd>

namespace comindex {

// Entry point of the `comindex` command. Returns the process exit code:
// 0 success, 2 usage or validation error, 3 numerical failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace comindex
