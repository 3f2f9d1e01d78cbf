#include <doctest.h>

#include <filesystem>

#include <unistd.h>

#include "bddlearn/errors.hpp"
#include "bddlearn/external.hpp"
#include "bddlearn/maxsat.hpp"
#include "bddlearn/sat_solver.hpp"
#include "support.hpp"

using namespace bddlearn;
using namespace bddlearn::solve;
using cnf::Lit;

namespace {

// n+1 pigeons into n holes.
cnf::Formula pigeonhole(int n) {
  cnf::Formula f((n + 1) * n);
  auto p = [n](int i, int h) { return i * n + h + 1; };
  for (int i = 0; i <= n; ++i) {
    cnf::Clause c;
    for (int h = 0; h < n; ++h)
      c.push_back(Lit::pos(p(i, h)));
    f.add_hard(c);
  }
  for (int h = 0; h < n; ++h)
    for (int i = 0; i <= n; ++i)
      for (int j = i + 1; j <= n; ++j)
        f.add_hard({Lit::neg(p(i, h)), Lit::neg(p(j, h))});
  return f;
}

} // namespace

TEST_SUITE("solve") {
  TEST_CASE("cdcl agrees with exhaustive search on random formulas") {
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<int> nv(1, 14);
    for (int t = 0; t < 300; ++t) {
      const int n = nv(rng);
      const auto f = testing::random_cnf(rng, n, static_cast<std::size_t>(n) * 4, 3);
      const auto r = sat_solve(f, {10.0, static_cast<std::uint64_t>(t), 0});
      const bool want = testing::brute_sat(f).has_value();
      REQUIRE(r.status != SatStatus::timeout);
      CHECK((r.status == SatStatus::sat) == want);
      if (r.model)
        CHECK(cnf::satisfies_hard(f, *r.model));
    }
  }

  TEST_CASE("trivial formulas") {
    CHECK(sat_solve(cnf::Formula()).status == SatStatus::sat);
    cnf::Formula f(1);
    f.add_hard({Lit::pos(1)});
    f.add_hard({Lit::neg(1)});
    CHECK(sat_solve(f).status == SatStatus::unsat);
    cnf::Formula g(2);
    g.add_hard({Lit::pos(1), Lit::pos(1), Lit::neg(1)});
    g.add_hard({Lit::neg(2), Lit::neg(2)});
    const auto r = sat_solve(g);
    REQUIRE(r.status == SatStatus::sat);
    CHECK_FALSE(r.model->value(2));
  }

  TEST_CASE("pigeonhole is unsatisfiable") {
    for (int n = 2; n <= 6; ++n)
      CHECK(sat_solve(pigeonhole(n)).status == SatStatus::unsat);
  }

  TEST_CASE("conflict limit yields timeout") {
    const auto r = sat_solve(pigeonhole(8), {900.0, 0, 5});
    CHECK(r.status == SatStatus::timeout);
    CHECK_FALSE(r.model.has_value());
    const auto z = sat_solve(pigeonhole(8), {0.0, 0, 0});
    CHECK(z.status == SatStatus::timeout);
  }

  TEST_CASE("same seed gives the same search") {
    std::mt19937_64 rng(4);
    const auto f = testing::random_cnf(rng, 60, 255, 3);
    const auto a = sat_solve(f, {60.0, 7, 0});
    const auto b = sat_solve(f, {60.0, 7, 0});
    CHECK(a.status == b.status);
    CHECK(a.stats.same_search(b.stats));
    CHECK(a.model == b.model);
  }

  TEST_CASE("incremental clauses") {
    CdclSolver s;
    s.reserve_vars(2);
    const cnf::Clause c1{Lit::pos(1), Lit::pos(2)};
    CHECK(s.add_clause(c1));
    CHECK(s.solve(Deadline(10)) == SatStatus::sat);
    const cnf::Clause c2{Lit::neg(1)};
    s.add_clause(c2);
    CHECK(s.solve(Deadline(10)) == SatStatus::sat);
    CHECK(s.model().value(2));
    const cnf::Clause c3{Lit::neg(2)};
    s.add_clause(c3);
    CHECK(s.solve(Deadline(10)) == SatStatus::unsat);
  }

  TEST_CASE("maxsat optimum matches exhaustive search") {
    std::mt19937_64 rng(17);
    for (int t = 0; t < 100; ++t) {
      auto f = testing::random_cnf(rng, 8, 10, 3);
      std::uniform_int_distribution<int> var(1, 8);
      std::bernoulli_distribution coin(0.5);
      for (int s = 0; s < 12; ++s)
        f.add_soft({Lit(var(rng), coin(rng)), Lit(var(rng), coin(rng))});
      const auto want = testing::brute_maxsat(f);
      const auto r = maxsat_solve(f, {30.0, 1, 0});
      if (!want) {
        CHECK(r.status == MaxSatStatus::unsatisfiable);
        continue;
      }
      REQUIRE(r.status == MaxSatStatus::optimum);
      CHECK(r.optimal);
      CHECK(r.cost == *want);
      REQUIRE(r.model);
      CHECK(r.model->var_count() == f.var_count());
      CHECK(cnf::soft_cost(f, *r.model) == r.cost);
      REQUIRE_FALSE(r.trajectory.empty());
      CHECK(r.trajectory.back() == r.cost);
      for (std::size_t i = 1; i < r.trajectory.size(); ++i)
        CHECK(r.trajectory[i] < r.trajectory[i - 1]);
    }
  }

  TEST_CASE("maxsat without soft clauses and with bad weights") {
    cnf::Formula f(1);
    f.add_hard({Lit::pos(1)});
    const auto r = maxsat_solve(f);
    CHECK(r.status == MaxSatStatus::optimum);
    CHECK(r.cost == 0);
    f.add_soft({Lit::neg(1)}, 2);
    CHECK_THROWS(maxsat_solve(f));
  }

  TEST_CASE("maxsat timeout before any model") {
    auto f = pigeonhole(9);
    f.add_soft({Lit::pos(1)});
    const auto r = maxsat_solve(f, {900.0, 0, 3});
    CHECK(r.status == MaxSatStatus::timeout_no_solution);
    CHECK_FALSE(r.model.has_value());
  }

  TEST_CASE("solver output interpretation") {
    cnf::Formula f(2);
    f.add_hard({Lit::pos(1), Lit::pos(2)});

    auto sat = std::get<SatResult>(interpret_solver_output(f, "s SATISFIABLE\nv -1 2 0\n", 10));
    CHECK(sat.status == SatStatus::sat);
    CHECK(sat.model->value(2));
    auto unsat = std::get<SatResult>(interpret_solver_output(f, "s UNSATISFIABLE\n", 20));
    CHECK(unsat.status == SatStatus::unsat);
    auto hinted = std::get<SatResult>(interpret_solver_output(f, "", 20));
    CHECK(hinted.status == SatStatus::unsat);
    auto unknown = std::get<SatResult>(interpret_solver_output(f, "s UNKNOWN\n", 0));
    CHECK(unknown.status == SatStatus::timeout);

    CHECK_THROWS_AS(interpret_solver_output(f, "garbage\n", 1), SolverIntegrationError);
    CHECK_THROWS_AS(interpret_solver_output(f, "s SATISFIABLE\n", 10), SolverIntegrationError);
    CHECK_THROWS_AS(interpret_solver_output(f, "s SATISFIABLE\nv -1 -2 0\n", 10),
                    SolverIntegrationError);
    CHECK_THROWS_AS(interpret_solver_output(f, "s SATISFIABLE\nv 1 q 0\n", 10),
                    SolverIntegrationError);

    cnf::Formula g = f;
    g.add_soft({Lit::neg(1)});
    g.add_soft({Lit::neg(2)});
    auto opt = std::get<MaxSatResult>(
        interpret_solver_output(g, "o 1\ns OPTIMUM FOUND\nv 1 -2 0\n", 30));
    CHECK(opt.status == MaxSatStatus::optimum);
    CHECK(opt.cost == 1);
    CHECK_THROWS_AS(interpret_solver_output(g, "o 0\ns OPTIMUM FOUND\nv 1 -2 0\n", 30),
                    SolverIntegrationError);
    auto feas = std::get<MaxSatResult>(
        interpret_solver_output(g, "s SATISFIABLE\nv 1 2 0\n", 10));
    CHECK(feas.status == MaxSatStatus::feasible);
    CHECK(feas.cost == 2);
  }

  TEST_CASE("external solver through the shell") {
    cnf::Formula f(1);
    f.add_hard({Lit::pos(1)});
    const auto dir = std::filesystem::temp_directory_path();
    auto r = std::get<SatResult>(
        external_solve(f, "test -s {file} && printf 's SATISFIABLE\\nv 1 0\\n'", dir));
    CHECK(r.status == SatStatus::sat);
    CHECK_THROWS_AS(external_solve(f, "echo nothing", dir), std::invalid_argument);
    CHECK_THROWS_AS(external_solve(f, "exit 3 # {file}", dir), SolverIntegrationError);
    // The temporary file does not outlive the call.
    for (const auto &e : std::filesystem::directory_iterator(dir))
      CHECK(e.path().filename().string().rfind("bddlearn-" + std::to_string(::getpid()), 0) ==
            std::string::npos);
  }
}
