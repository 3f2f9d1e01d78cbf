#include "bddlearn/maxsat.hpp"

#include <stdexcept>

namespace bddlearn::solve {

MaxSatResult maxsat_solve(const cnf::Formula &f, const SolveOptions &opts) {
  for (const auto &s : f.soft())
    if (s.weight != 1)
      throw std::invalid_argument("maxsat_solve supports unit weights only");

  Deadline deadline(opts.budget_seconds);
  CdclSolver solver(opts.seed);
  MaxSatResult result;

  // Working copy: relaxed soft clauses become hard; counters are appended.
  cnf::Formula work(f.var_count());
  std::vector<cnf::Lit> relax;
  for (std::size_t i = 0; i < f.soft().size(); ++i)
    relax.push_back(cnf::Lit::pos(work.fresh_var()));
  solver.reserve_vars(work.var_count());
  // A false return only means the clause set is already UNSAT; solve()
  // reports that.
  for (const auto &c : f.hard())
    solver.add_clause(c);
  for (std::size_t i = 0; i < f.soft().size(); ++i) {
    auto c = f.soft()[i].lits;
    c.push_back(relax[i]);
    solver.add_clause(c);
  }

  auto finish = [&](MaxSatStatus status) {
    result.status = status;
    result.optimal = status == MaxSatStatus::optimum;
    result.stats = solver.stats();
    return result;
  };

  for (;;) {
    const auto status = solver.solve(deadline, opts.conflict_limit);
    if (status == SatStatus::timeout)
      return finish(result.model ? MaxSatStatus::feasible
                                 : MaxSatStatus::timeout_no_solution);
    if (status == SatStatus::unsat)
      return finish(result.model ? MaxSatStatus::optimum
                                 : MaxSatStatus::unsatisfiable);

    cnf::Model m = solver.model();
    m.truncate(f.var_count());
    if (!cnf::satisfies_hard(f, m))
      throw std::logic_error("MaxSAT model violates a hard clause");
    // The relaxation variables may be set gratuitously; count what the
    // assignment to the original variables actually falsifies.
    const auto cost = cnf::soft_cost(f, m);
    if (result.model && cost >= result.cost)
      throw std::logic_error("MaxSAT descent failed to improve");
    result.model = std::move(m);
    result.cost = cost;
    result.trajectory.push_back(cost);
    if (cost == 0)
      return finish(MaxSatStatus::optimum);

    const std::size_t first_new = work.hard().size();
    cnf::at_most_k(work, relax, static_cast<std::size_t>(cost - 1));
    solver.reserve_vars(work.var_count());
    for (std::size_t i = first_new; i < work.hard().size(); ++i)
      solver.add_clause(work.hard()[i]);
  }
}

} // namespace bddlearn::solve
