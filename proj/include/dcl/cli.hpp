#pragma once

#include <ostream>

namespace dcl::cli {

/// Parses argv, runs one subcommand and writes its JSON report to --out or
/// `out`. Returns 0 when every check passes, 1 when a check fails and 2 on
/// usage or configuration errors.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dcl::cli
