#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "bddlearn/cnf.hpp"

namespace bddlearn::solve {

enum class SatStatus { sat, unsat, timeout };

struct SolverStats {
  std::uint64_t conflicts = 0;
  std::uint64_t decisions = 0;
  std::uint64_t propagations = 0;
  std::uint64_t restarts = 0;
  std::uint64_t learned = 0;
  std::uint64_t deleted = 0;
  double seconds = 0.0;

  /// Everything except wall-clock time.
  [[nodiscard]] bool same_search(const SolverStats &o) const noexcept {
    return conflicts == o.conflicts && decisions == o.decisions &&
           propagations == o.propagations && restarts == o.restarts &&
           learned == o.learned && deleted == o.deleted;
  }
};

struct SolveOptions {
  /// Wall-clock budget in seconds.
  double budget_seconds = 900.0;
  std::uint64_t seed = 0;
  /// 0 means unlimited.
  std::uint64_t conflict_limit = 0;
};

class Deadline {
public:
  explicit Deadline(double seconds)
      : start_(std::chrono::steady_clock::now()),
        end_(start_ + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                          std::chrono::duration<double>(seconds))) {}

  [[nodiscard]] bool expired() const {
    return std::chrono::steady_clock::now() >= end_;
  }
  [[nodiscard]] double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
        .count();
  }
  [[nodiscard]] double remaining() const {
    return std::chrono::duration<double>(end_ - std::chrono::steady_clock::now())
        .count();
  }

private:
  std::chrono::steady_clock::time_point start_;
  std::chrono::steady_clock::time_point end_;
};

/// Conflict-driven clause-learning SAT solver.
///
/// Two watched literals with blocking literals, first-UIP learning with
/// clause minimization, VSIDS decisions with phase saving, Luby restarts and
/// activity-based learned-clause deletion. Clauses may be added between
/// calls to solve(); learned clauses are kept.
class CdclSolver {
public:
  explicit CdclSolver(std::uint64_t seed = 0);
  CdclSolver(const CdclSolver &) = delete;
  CdclSolver &operator=(const CdclSolver &) = delete;

  [[nodiscard]] cnf::Var num_vars() const noexcept {
    return static_cast<cnf::Var>(assigns_.size());
  }
  /// Make sure variables 1..n exist.
  void reserve_vars(cnf::Var n);

  /// Returns false once the clause set is known to be unsatisfiable.
  bool add_clause(std::span<const cnf::Lit> lits);

  SatStatus solve(const Deadline &deadline, std::uint64_t conflict_limit = 0);

  /// Assignment found by the last successful solve().
  [[nodiscard]] const cnf::Model &model() const noexcept { return model_; }
  [[nodiscard]] const SolverStats &stats() const noexcept { return stats_; }

private:
  using LitCode = std::uint32_t;
  using CRef = std::uint32_t;
  static constexpr CRef no_reason = UINT32_MAX;
  static constexpr std::int8_t l_true = 1;
  static constexpr std::int8_t l_false = 0;
  static constexpr std::int8_t l_undef = -1;

  struct ClauseRec {
    std::vector<LitCode> lits;
    double activity = 0.0;
    bool learnt = false;
    bool deleted = false;
  };
  struct Watcher {
    CRef cref;
    LitCode blocker;
  };

  // Max-heap of variables keyed on activity.
  class VarHeap {
  public:
    explicit VarHeap(const std::vector<double> &act) : act_(act) {}
    [[nodiscard]] bool empty() const noexcept { return heap_.empty(); }
    [[nodiscard]] bool contains(std::uint32_t v) const {
      return v < pos_.size() && pos_[v] >= 0;
    }
    void grow(std::uint32_t n) { pos_.resize(n, -1); }
    void insert(std::uint32_t v);
    void increased(std::uint32_t v) { up(static_cast<std::size_t>(pos_[v])); }
    std::uint32_t pop();

  private:
    bool less(std::uint32_t a, std::uint32_t b) const { return act_[a] < act_[b]; }
    void up(std::size_t i);
    void down(std::size_t i);

    const std::vector<double> &act_;
    std::vector<std::uint32_t> heap_;
    std::vector<int> pos_;
  };

  static LitCode code(cnf::Lit l) {
    return 2 * static_cast<LitCode>(l.var() - 1) + (l.negated() ? 1 : 0);
  }
  [[nodiscard]] std::int8_t value(LitCode l) const {
    const auto a = assigns_[l >> 1];
    return a == l_undef ? l_undef : static_cast<std::int8_t>(a ^ (l & 1));
  }
  [[nodiscard]] int decision_level() const noexcept {
    return static_cast<int>(trail_lim_.size());
  }

  void new_var();
  void attach(CRef cref);
  void enqueue(LitCode l, CRef reason);
  CRef propagate();
  void analyze(CRef conflict, std::vector<LitCode> &learnt, int &backtrack);
  void cancel_until(int level);
  void bump_var(std::uint32_t v);
  void bump_clause(ClauseRec &c);
  bool locked(CRef cref) const;
  void reduce_learnts();
  enum class SearchResult { sat, unsat, timeout, restart };
  SearchResult search(std::uint64_t max_conflicts, const Deadline &deadline,
                   std::uint64_t conflict_limit);

  std::vector<ClauseRec> clauses_;
  std::vector<CRef> learnts_;
  std::vector<std::vector<Watcher>> watches_;
  std::vector<std::int8_t> assigns_;
  std::vector<int> level_;
  std::vector<CRef> reason_;
  std::vector<std::uint8_t> phase_;
  std::vector<double> activity_;
  std::vector<std::uint8_t> seen_;
  std::vector<LitCode> trail_;
  std::vector<std::size_t> trail_lim_;
  std::size_t qhead_ = 0;
  VarHeap order_{activity_};

  double var_inc_ = 1.0;
  double cla_inc_ = 1.0;
  double max_learnts_ = 0.0;
  bool ok_ = true;
  std::uint64_t ticks_ = 0;
  std::uint64_t solve_start_conflicts_ = 0;
  std::mt19937_64 rng_;
  cnf::Model model_;
  SolverStats stats_;
};

struct SatResult {
  SatStatus status = SatStatus::timeout;
  std::optional<cnf::Model> model;
  SolverStats stats;
};

/// Solves the hard clauses of `f` (soft clauses are ignored with a warning
/// on std::clog). A returned model is always re-checked against every hard
/// clause.
SatResult sat_solve(const cnf::Formula &f, const SolveOptions &opts = {});

} // namespace bddlearn::solve
