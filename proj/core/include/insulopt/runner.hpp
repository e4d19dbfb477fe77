#pragma once

#include <iosfwd>
#include <string>

#include "insulopt/config.hpp"

namespace insulopt {

struct RunOptions {
    std::string config_path;
    std::string out_dir = ".";
    int threads = 1;
    unsigned seed = 12345;   // random trial fields of the verify command
};

// Subcommand drivers.  Each loads the config, writes its result files into
// out_dir and prints a short summary to `log`; failures are reported by
// throwing (the CLI maps exception types to exit codes).
void run_solve_reduced(const RunOptions& opt, std::ostream& log);
void run_solve_thick(const RunOptions& opt, std::ostream& log);
void run_optimize(const RunOptions& opt, std::ostream& log);

// Resolved-model energies over the epsilon sweep against the reduced energy
// on the same body mesh.  Throws VerificationError unless the energy gaps
// decrease monotonically to below 5% of the reduced energy.
void run_gamma_sweep(const RunOptions& opt, std::ostream& log);

// Geometry and inequality diagnostics on the configured problem; throws
// VerificationError listing every failed check.
void run_verify(const RunOptions& opt, std::ostream& log);

void run_mesh_info(const RunOptions& opt, std::ostream& log);

// Exit code mapping shared by the CLI and the tests:
//   0 success, 2 configuration error, 3 solver/geometry failure,
//   4 degenerate optimization, 5 verification failure.
int run_subcommand(const std::string& name, const RunOptions& opt, std::ostream& log,
                   std::ostream& err);

}  // namespace insulopt
