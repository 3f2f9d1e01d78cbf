#pragma once

#include <filesystem>
#include <string>
#include <variant>

#include "bddlearn/cnf.hpp"
#include "bddlearn/maxsat.hpp"
#include "bddlearn/sat_solver.hpp"

namespace bddlearn::solve {

using ExternalResult = std::variant<SatResult, MaxSatResult>;

/// Runs an external DIMACS solver.
///
/// The formula is written to `workdir` as CNF (hard clauses only) or WCNF,
/// "{file}" in `command_template` is replaced by that path, and the command
/// runs through the shell with the current environment. Its stdout is
/// parsed for "s", "v" and "o" lines; exit codes 10/20 are taken as
/// SAT/UNSAT hints when no status line is printed. Any returned model is
/// verified against the hard clauses and, for MaxSAT, the reported cost is
/// checked against the model. Failures throw SolverIntegrationError.
ExternalResult external_solve(const cnf::Formula &f,
                              const std::string &command_template,
                              const std::filesystem::path &workdir);

/// Interprets captured solver output; split out from external_solve so the
/// parsing rules can be exercised without spawning processes.
ExternalResult interpret_solver_output(const cnf::Formula &f,
                                       const std::string &output, int exit_code);

} // namespace bddlearn::solve
