#include "bddlearn/sat_solver.hpp"

#include <algorithm>
#include <iostream>
#include <stdexcept>

namespace bddlearn::solve {

namespace {

constexpr double var_decay = 0.95;
constexpr double clause_decay = 0.999;
constexpr std::uint64_t restart_base = 100;

// Luby sequence with base y: 1 1 2 1 1 2 4 ...
double luby(double y, std::uint64_t x) {
  std::uint64_t size = 1;
  int seq = 0;
  while (size < x + 1) {
    ++seq;
    size = 2 * size + 1;
  }
  while (size - 1 != x) {
    size = (size - 1) >> 1;
    --seq;
    x = x % size;
  }
  double r = 1.0;
  for (int i = 0; i < seq; ++i)
    r *= y;
  return r;
}

} // namespace

void CdclSolver::VarHeap::insert(std::uint32_t v) {
  if (contains(v))
    return;
  pos_[v] = static_cast<int>(heap_.size());
  heap_.push_back(v);
  up(heap_.size() - 1);
}

std::uint32_t CdclSolver::VarHeap::pop() {
  const std::uint32_t top = heap_.front();
  heap_.front() = heap_.back();
  pos_[heap_.front()] = 0;
  pos_[top] = -1;
  heap_.pop_back();
  if (heap_.size() > 1)
    down(0);
  return top;
}

void CdclSolver::VarHeap::up(std::size_t i) {
  const std::uint32_t v = heap_[i];
  while (i > 0) {
    const std::size_t parent = (i - 1) / 2;
    if (!less(heap_[parent], v))
      break;
    heap_[i] = heap_[parent];
    pos_[heap_[i]] = static_cast<int>(i);
    i = parent;
  }
  heap_[i] = v;
  pos_[v] = static_cast<int>(i);
}

void CdclSolver::VarHeap::down(std::size_t i) {
  const std::uint32_t v = heap_[i];
  for (;;) {
    std::size_t child = 2 * i + 1;
    if (child >= heap_.size())
      break;
    if (child + 1 < heap_.size() && less(heap_[child], heap_[child + 1]))
      ++child;
    if (!less(v, heap_[child]))
      break;
    heap_[i] = heap_[child];
    pos_[heap_[i]] = static_cast<int>(i);
    i = child;
  }
  heap_[i] = v;
  pos_[v] = static_cast<int>(i);
}

CdclSolver::CdclSolver(std::uint64_t seed) : rng_(seed) {}

void CdclSolver::new_var() {
  const auto v = static_cast<std::uint32_t>(assigns_.size());
  assigns_.push_back(l_undef);
  level_.push_back(0);
  reason_.push_back(no_reason);
  phase_.push_back(0);
  // Tiny seeded jitter so the seed decides early tie-breaks.
  activity_.push_back(std::uniform_real_distribution<double>(0.0, 1e-5)(rng_));
  seen_.push_back(0);
  watches_.emplace_back();
  watches_.emplace_back();
  order_.grow(v + 1);
  order_.insert(v);
}

void CdclSolver::reserve_vars(cnf::Var n) {
  while (num_vars() < n)
    new_var();
}

void CdclSolver::attach(CRef cref) {
  const auto &lits = clauses_[cref].lits;
  watches_[lits[0]].push_back({cref, lits[1]});
  watches_[lits[1]].push_back({cref, lits[0]});
}

bool CdclSolver::add_clause(std::span<const cnf::Lit> lits) {
  if (!ok_)
    return false;
  cancel_until(0);
  std::vector<LitCode> c;
  c.reserve(lits.size());
  for (const auto &l : lits) {
    if (l.var() < 1)
      throw std::invalid_argument("variable ids start at 1");
    reserve_vars(l.var());
    c.push_back(code(l));
  }
  std::sort(c.begin(), c.end());
  c.erase(std::unique(c.begin(), c.end()), c.end());
  std::vector<LitCode> kept;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i + 1 < c.size() && (c[i] ^ 1) == c[i + 1])
      return true; // tautology
    const auto val = value(c[i]);
    if (val == l_true)
      return true;
    if (val == l_undef)
      kept.push_back(c[i]);
  }
  if (kept.empty()) {
    ok_ = false;
    return false;
  }
  if (kept.size() == 1) {
    enqueue(kept[0], no_reason);
    ok_ = propagate() == no_reason;
    return ok_;
  }
  clauses_.push_back({std::move(kept), 0.0, false, false});
  attach(static_cast<CRef>(clauses_.size() - 1));
  return true;
}

void CdclSolver::enqueue(LitCode l, CRef reason) {
  const auto v = l >> 1;
  assigns_[v] = static_cast<std::int8_t>((l & 1) ? l_false : l_true);
  level_[v] = decision_level();
  reason_[v] = reason;
  trail_.push_back(l);
}

CdclSolver::CRef CdclSolver::propagate() {
  CRef conflict = no_reason;
  while (qhead_ < trail_.size()) {
    const LitCode p = trail_[qhead_++];
    const LitCode false_lit = p ^ 1;
    auto &ws = watches_[false_lit];
    ++stats_.propagations;
    std::size_t i = 0;
    std::size_t j = 0;
    const std::size_t n = ws.size();
    while (i < n) {
      const Watcher w = ws[i];
      if (value(w.blocker) == l_true) {
        ws[j++] = ws[i++];
        continue;
      }
      ClauseRec &c = clauses_[w.cref];
      if (c.deleted) {
        ++i;
        continue;
      }
      auto &lits = c.lits;
      if (lits[0] == false_lit)
        std::swap(lits[0], lits[1]);
      const LitCode first = lits[0];
      const Watcher kept{w.cref, first};
      ++i;
      if (value(first) == l_true) {
        ws[j++] = kept;
        continue;
      }
      bool moved = false;
      for (std::size_t k = 2; k < lits.size(); ++k) {
        if (value(lits[k]) != l_false) {
          std::swap(lits[1], lits[k]);
          watches_[lits[1]].push_back(kept);
          moved = true;
          break;
        }
      }
      if (moved)
        continue;
      ws[j++] = kept;
      if (value(first) == l_false) {
        conflict = w.cref;
        qhead_ = trail_.size();
        while (i < n)
          ws[j++] = ws[i++];
      } else {
        enqueue(first, w.cref);
      }
    }
    ws.resize(j);
  }
  return conflict;
}

void CdclSolver::bump_var(std::uint32_t v) {
  activity_[v] += var_inc_;
  if (activity_[v] > 1e100) {
    for (auto &a : activity_)
      a *= 1e-100;
    var_inc_ *= 1e-100;
  }
  if (order_.contains(v))
    order_.increased(v);
}

void CdclSolver::bump_clause(ClauseRec &c) {
  c.activity += cla_inc_;
  if (c.activity > 1e20) {
    for (auto cref : learnts_)
      clauses_[cref].activity *= 1e-20;
    cla_inc_ *= 1e-20;
  }
}

void CdclSolver::analyze(CRef conflict, std::vector<LitCode> &learnt,
                         int &backtrack) {
  learnt.clear();
  learnt.push_back(0); // slot for the asserting literal
  int open = 0;
  bool have_p = false;
  LitCode p = 0;
  std::size_t index = trail_.size();
  CRef cref = conflict;

  do {
    ClauseRec &c = clauses_[cref];
    if (c.learnt)
      bump_clause(c);
    for (std::size_t k = have_p ? 1 : 0; k < c.lits.size(); ++k) {
      const LitCode q = c.lits[k];
      const auto v = q >> 1;
      if (!seen_[v] && level_[v] > 0) {
        bump_var(v);
        seen_[v] = 1;
        if (level_[v] >= decision_level())
          ++open;
        else
          learnt.push_back(q);
      }
    }
    while (!seen_[trail_[--index] >> 1]) {
    }
    p = trail_[index];
    have_p = true;
    cref = reason_[p >> 1];
    seen_[p >> 1] = 0;
    --open;
  } while (open > 0);
  learnt[0] = p ^ 1;

  // Drop literals implied by the rest of the clause.
  std::vector<LitCode> to_clear(learnt.begin() + 1, learnt.end());
  std::size_t out = 1;
  for (std::size_t i = 1; i < learnt.size(); ++i) {
    const auto v = learnt[i] >> 1;
    const CRef r = reason_[v];
    bool keep = r == no_reason;
    if (!keep) {
      const auto &rl = clauses_[r].lits;
      for (std::size_t k = 1; k < rl.size(); ++k) {
        const auto u = rl[k] >> 1;
        if (!seen_[u] && level_[u] > 0) {
          keep = true;
          break;
        }
      }
    }
    if (keep)
      learnt[out++] = learnt[i];
  }
  learnt.resize(out);
  for (auto l : to_clear)
    seen_[l >> 1] = 0;

  if (learnt.size() == 1) {
    backtrack = 0;
    return;
  }
  std::size_t max_i = 1;
  for (std::size_t i = 2; i < learnt.size(); ++i)
    if (level_[learnt[i] >> 1] > level_[learnt[max_i] >> 1])
      max_i = i;
  std::swap(learnt[1], learnt[max_i]);
  backtrack = level_[learnt[1] >> 1];
}

void CdclSolver::cancel_until(int level) {
  if (decision_level() <= level)
    return;
  for (std::size_t c = trail_.size(); c-- > trail_lim_[static_cast<std::size_t>(level)];) {
    const auto v = trail_[c] >> 1;
    phase_[v] = assigns_[v] == l_true ? 1 : 0;
    assigns_[v] = l_undef;
    reason_[v] = no_reason;
    order_.insert(v);
  }
  qhead_ = trail_lim_[static_cast<std::size_t>(level)];
  trail_.resize(qhead_);
  trail_lim_.resize(static_cast<std::size_t>(level));
}

bool CdclSolver::locked(CRef cref) const {
  const auto &c = clauses_[cref];
  const auto v = c.lits[0] >> 1;
  return reason_[v] == cref && value(c.lits[0]) == l_true;
}

void CdclSolver::reduce_learnts() {
  std::sort(learnts_.begin(), learnts_.end(), [&](CRef a, CRef b) {
    const auto &x = clauses_[a];
    const auto &y = clauses_[b];
    if (x.activity != y.activity)
      return x.activity < y.activity;
    return a < b;
  });
  const std::size_t half = learnts_.size() / 2;
  std::vector<CRef> kept;
  for (std::size_t i = 0; i < learnts_.size(); ++i) {
    const CRef cref = learnts_[i];
    auto &c = clauses_[cref];
    if (i < half && c.lits.size() > 2 && !locked(cref)) {
      c.deleted = true;
      c.lits.clear();
      c.lits.shrink_to_fit();
      ++stats_.deleted;
    } else {
      kept.push_back(cref);
    }
  }
  learnts_ = std::move(kept);
}

CdclSolver::SearchResult CdclSolver::search(std::uint64_t max_conflicts,
                             const Deadline &deadline,
                             std::uint64_t conflict_limit) {
  std::uint64_t conflicts_here = 0;
  std::vector<LitCode> learnt;
  for (;;) {
    const CRef conflict = propagate();
    if (conflict != no_reason) {
      ++stats_.conflicts;
      ++conflicts_here;
      if (decision_level() == 0) {
        ok_ = false;
        return SearchResult::unsat;
      }
      int backtrack = 0;
      analyze(conflict, learnt, backtrack);
      cancel_until(backtrack);
      if (learnt.size() == 1) {
        enqueue(learnt[0], no_reason);
      } else {
        clauses_.push_back({learnt, 0.0, true, false});
        const auto cref = static_cast<CRef>(clauses_.size() - 1);
        learnts_.push_back(cref);
        attach(cref);
        bump_clause(clauses_[cref]);
        enqueue(learnt[0], cref);
      }
      ++stats_.learned;
      var_inc_ /= var_decay;
      cla_inc_ /= clause_decay;
      if (conflict_limit != 0 &&
          stats_.conflicts - solve_start_conflicts_ >= conflict_limit)
        return SearchResult::timeout;
      if ((stats_.conflicts & 63U) == 0 && deadline.expired())
        return SearchResult::timeout;
    } else {
      if (conflicts_here >= max_conflicts) {
        cancel_until(0);
        return SearchResult::restart;
      }
      if ((++ticks_ & 255U) == 0 && deadline.expired())
        return SearchResult::timeout;
      if (static_cast<double>(learnts_.size()) -
              static_cast<double>(trail_.size()) >=
          max_learnts_) {
        reduce_learnts();
        max_learnts_ *= 1.1;
      }

      std::uint32_t next = UINT32_MAX;
      while (!order_.empty()) {
        const auto v = order_.pop();
        if (assigns_[v] == l_undef) {
          next = v;
          break;
        }
      }
      if (next == UINT32_MAX) {
        model_ = cnf::Model(num_vars());
        for (std::uint32_t v = 0; v < assigns_.size(); ++v)
          model_.set(static_cast<cnf::Var>(v + 1), assigns_[v] == l_true);
        return SearchResult::sat;
      }
      ++stats_.decisions;
      trail_lim_.push_back(trail_.size());
      enqueue(2 * next + (phase_[next] ? 0 : 1), no_reason);
    }
  }
}

SatStatus CdclSolver::solve(const Deadline &deadline,
                            std::uint64_t conflict_limit) {
  model_ = cnf::Model();
  if (!ok_)
    return SatStatus::unsat;
  solve_start_conflicts_ = stats_.conflicts;
  max_learnts_ = std::max(static_cast<double>(clauses_.size()) / 3.0, 2000.0);
  const double t0 = deadline.elapsed();

  SatStatus status = SatStatus::timeout;
  for (std::uint64_t restart = 0;; ++restart) {
    const auto budget =
        static_cast<std::uint64_t>(luby(2.0, restart) * restart_base);
    const auto r = search(budget, deadline, conflict_limit);
    if (r == SearchResult::restart) {
      ++stats_.restarts;
      if (deadline.expired())
        break;
      continue;
    }
    status = r == SearchResult::sat     ? SatStatus::sat
             : r == SearchResult::unsat ? SatStatus::unsat
                                        : SatStatus::timeout;
    break;
  }
  cancel_until(0);
  stats_.seconds += deadline.elapsed() - t0;
  return status;
}

SatResult sat_solve(const cnf::Formula &f, const SolveOptions &opts) {
  if (!f.soft().empty())
    std::clog << "warning: sat_solve ignores " << f.soft().size()
              << " soft clauses\n";
  Deadline deadline(opts.budget_seconds);
  CdclSolver solver(opts.seed);
  solver.reserve_vars(f.var_count());
  for (const auto &c : f.hard())
    if (!solver.add_clause(c))
      break;

  SatResult result;
  result.status = solver.solve(deadline, opts.conflict_limit);
  result.stats = solver.stats();
  if (result.status == SatStatus::sat) {
    cnf::Model m = solver.model();
    m.truncate(f.var_count());
    if (!cnf::satisfies_hard(f, m))
      throw std::logic_error("embedded solver returned a model that violates a "
                             "hard clause");
    result.model = std::move(m);
  }
  return result;
}

} // namespace bddlearn::solve
