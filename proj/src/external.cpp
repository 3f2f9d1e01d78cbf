#include "bddlearn/external.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <memory>

#include "bddlearn/errors.hpp"

namespace bddlearn::solve {

namespace {

std::string shell_quote(const std::string &s) {
  std::string out = "'";
  for (char ch : s) {
    if (ch == '\'')
      out += "'\\''";
    else
      out.push_back(ch);
  }
  return out + "'";
}

struct RemoveOnExit {
  std::filesystem::path path;
  ~RemoveOnExit() {
    std::error_code ec;
    std::filesystem::remove(path, ec);
  }
};

cnf::Model verified(const cnf::Formula &f, cnf::Model m) {
  m.truncate(f.var_count());
  if (!cnf::satisfies_hard(f, m))
    throw SolverIntegrationError(
        "external solver returned a model that violates a hard clause");
  return m;
}

} // namespace

ExternalResult interpret_solver_output(const cnf::Formula &f,
                                       const std::string &output,
                                       int exit_code) {
  cnf::ParsedOutput parsed;
  try {
    parsed = cnf::parse_solver_output(output);
  } catch (const std::exception &e) {
    throw SolverIntegrationError(std::string("cannot parse solver output: ") +
                                 e.what());
  }

  auto status = parsed.status;
  if (!parsed.has_status_line) {
    if (exit_code == 10)
      status = cnf::ModelStatus::satisfiable;
    else if (exit_code == 20)
      status = cnf::ModelStatus::unsatisfiable;
    else
      throw SolverIntegrationError("solver printed no status line (exit code " +
                                   std::to_string(exit_code) + ")");
  }

  const bool has_model_status = status == cnf::ModelStatus::satisfiable ||
                                status == cnf::ModelStatus::optimum;
  if (has_model_status && !parsed.model)
    throw SolverIntegrationError("solver reported a solution without a v-line");

  if (f.soft().empty()) {
    SatResult r;
    if (has_model_status) {
      r.status = SatStatus::sat;
      r.model = verified(f, std::move(*parsed.model));
    } else if (status == cnf::ModelStatus::unsatisfiable) {
      r.status = SatStatus::unsat;
    } else {
      r.status = SatStatus::timeout;
    }
    return r;
  }

  MaxSatResult r;
  if (status == cnf::ModelStatus::unsatisfiable) {
    r.status = MaxSatStatus::unsatisfiable;
    return r;
  }
  if (!parsed.model) {
    r.status = MaxSatStatus::timeout_no_solution;
    return r;
  }
  r.model = verified(f, std::move(*parsed.model));
  r.cost = cnf::soft_cost(f, *r.model);
  if (parsed.reported_cost && *parsed.reported_cost != r.cost)
    throw SolverIntegrationError(
        "solver reported cost " + std::to_string(*parsed.reported_cost) +
        " but its model falsifies soft weight " + std::to_string(r.cost));
  r.trajectory.push_back(r.cost);
  r.optimal = status == cnf::ModelStatus::optimum;
  r.status = r.optimal ? MaxSatStatus::optimum : MaxSatStatus::feasible;
  return r;
}

ExternalResult external_solve(const cnf::Formula &f,
                              const std::string &command_template,
                              const std::filesystem::path &workdir) {
  static std::atomic<unsigned> counter{0};
  const auto placeholder = command_template.find("{file}");
  if (placeholder == std::string::npos)
    throw std::invalid_argument("solver command template lacks {file}");

  const bool weighted = !f.soft().empty();
  std::filesystem::create_directories(workdir);
  const auto path =
      workdir / ("bddlearn-" + std::to_string(::getpid()) + "-" +
                 std::to_string(counter++) + (weighted ? ".wcnf" : ".cnf"));
  RemoveOnExit cleanup{path};
  {
    std::ofstream out(path);
    if (!out)
      throw SolverIntegrationError("cannot write " + path.string());
    if (weighted)
      cnf::emit_dimacs_wcnf(f, out);
    else
      cnf::emit_dimacs_cnf(f, out);
  }

  std::string command = command_template;
  for (auto pos = command.find("{file}"); pos != std::string::npos;
       pos = command.find("{file}", pos)) {
    const auto quoted = shell_quote(path.string());
    command.replace(pos, 6, quoted);
    pos += quoted.size();
  }

  FILE *pipe = ::popen(command.c_str(), "r");
  if (pipe == nullptr)
    throw SolverIntegrationError("cannot start solver command: " + command);
  std::string output;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0)
    output.append(buf.data(), n);
  const int raw = ::pclose(pipe);
  const int exit_code = (raw != -1 && WIFEXITED(raw)) ? WEXITSTATUS(raw) : -1;
  return interpret_solver_output(f, output, exit_code);
}

} // namespace bddlearn::solve
