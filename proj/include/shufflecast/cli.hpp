#pragma once

#include <iosfwd>

namespace shufflecast {

/// Command-line front end. Subcommands: analyze, encode, verify, simulate,
/// worstcase. Exit codes: 0 success, 2 input error, 3 verification failure.
/// `out` receives regular output (including CSV when --csv is '-'), `err`
/// receives diagnostics and the simulate summary line.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace shufflecast
