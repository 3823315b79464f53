#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace levy::cli {

/// Exit codes of the command-line front end.
enum ExitCode : int
{
    success = 0,
    failure = 1,  //!< runtime, numerical or I/O error
    usage = 2,    //!< invalid flags or parameters
};

/*!
 * Run the `levyflight` command line with `args` (program name excluded).
 *
 * Data goes to `out` unless `--out` names a file; diagnostics go to `err`.
 * Every error produces a single `error: ...` line on `err`.
 */
int run(std::vector<std::string> const& args, std::ostream& out, std::ostream& err);

}  // namespace levy::cli
