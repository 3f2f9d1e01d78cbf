#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "bddlearn/cnf.hpp"
#include "bddlearn/sat_solver.hpp"

namespace bddlearn::solve {

enum class MaxSatStatus {
  optimum,             ///< cost proven minimal
  feasible,            ///< budget ran out after a model was found
  timeout_no_solution, ///< budget ran out before any model
  unsatisfiable,       ///< the hard clauses alone have no model
};

struct MaxSatResult {
  MaxSatStatus status = MaxSatStatus::timeout_no_solution;
  /// Restricted to the formula's own variables.
  std::optional<cnf::Model> model;
  /// Total weight of falsified soft clauses under `model`.
  std::uint64_t cost = 0;
  bool optimal = false;
  /// Cost after each improving SAT call, in order.
  std::vector<std::uint64_t> trajectory;
  SolverStats stats;
};

/// Complete partial MaxSAT by linear UNSAT-driven descent.
///
/// Every soft clause C becomes C or b with a fresh relaxation variable b.
/// After each model the bound is tightened to (cost of the model) - 1 with
/// a sequential counter over the b's; the first UNSAT call proves the last
/// model optimal. Only unit weights are accepted.
MaxSatResult maxsat_solve(const cnf::Formula &f, const SolveOptions &opts = {});

} // namespace bddlearn::solve
