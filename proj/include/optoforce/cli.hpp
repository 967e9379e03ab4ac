#pragma once

#include <iosfwd>

namespace optoforce {

/// Process exit codes.
enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,  // unexpected internal failure (including norm drift)
    kExitInput = 2,
    kExitInference = 3,
    kExitOracleRefusal = 4,
};

/// Runs one command line (argv[0] is the program name). Subcommands:
///   emit <config> <out.csv>
///   scatter <config> <out-stem>
///   infer <spectrum.csv> <config> --mode zpl|height [--prior lo,hi] [--reference x] [--out file]
///   oracle <config> <out.json>
///   figure --id ID <outdir>
/// Results go to files and `out`; diagnostics and warnings go to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace optoforce
