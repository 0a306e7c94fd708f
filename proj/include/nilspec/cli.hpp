#pragma once

#include <ostream>

namespace nilspec {

/// Command-line entry point. Exit codes: 0 claims verified, 1 refuted or
/// mismatched, 2 usage or parse error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nilspec
