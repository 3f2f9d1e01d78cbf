#include "bddlearn/search.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <thread>

#include "bddlearn/encode.hpp"
#include "bddlearn/errors.hpp"
#include "bddlearn/external.hpp"
#include "bddlearn/maxsat.hpp"

namespace bddlearn::search {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct SolveOutcome {
  enum class Kind { model, unsat, timeout } kind = Kind::timeout;
  cnf::Model model;
  bool optimal = false;
  std::uint64_t cost = 0;
  solve::SolverStats stats;
};

SolveOutcome run_solver(const cnf::Formula &f, const LearnConfig &cfg,
                        double budget) {
  SolveOutcome out;
  const solve::SolveOptions opts{budget, cfg.seed, 0};
  const bool weighted = !f.soft().empty();

  auto from_sat = [&](const solve::SatResult &r) {
    out.stats = r.stats;
    if (r.status == solve::SatStatus::sat) {
      out.kind = SolveOutcome::Kind::model;
      out.model = *r.model;
      out.optimal = true;
    } else {
      out.kind = r.status == solve::SatStatus::unsat ? SolveOutcome::Kind::unsat
                                                     : SolveOutcome::Kind::timeout;
    }
  };
  auto from_maxsat = [&](const solve::MaxSatResult &r) {
    out.stats = r.stats;
    switch (r.status) {
    case solve::MaxSatStatus::optimum:
    case solve::MaxSatStatus::feasible:
      out.kind = SolveOutcome::Kind::model;
      out.model = *r.model;
      out.optimal = r.optimal;
      out.cost = r.cost;
      break;
    case solve::MaxSatStatus::unsatisfiable:
      out.kind = SolveOutcome::Kind::unsat;
      break;
    case solve::MaxSatStatus::timeout_no_solution:
      out.kind = SolveOutcome::Kind::timeout;
      break;
    }
  };

  if (!cfg.solver.external_command.empty()) {
    const auto r =
        solve::external_solve(f, cfg.solver.external_command, cfg.solver.workdir);
    if (weighted)
      from_maxsat(std::get<solve::MaxSatResult>(r));
    else
      from_sat(std::get<solve::SatResult>(r));
  } else if (weighted) {
    from_maxsat(solve::maxsat_solve(f, opts));
  } else {
    from_sat(solve::sat_solve(f, opts));
  }
  return out;
}

std::vector<std::size_t> all_features(std::size_t k) {
  std::vector<std::size_t> v(k);
  std::iota(v.begin(), v.end(), std::size_t{0});
  return v;
}

bdd::FeatureOrdering lift(const bdd::FeatureOrdering &local,
                          const std::vector<std::size_t> &candidates) {
  std::vector<std::size_t> full;
  full.reserve(local.size());
  for (auto r : local)
    full.push_back(candidates[r]);
  return bdd::FeatureOrdering(std::move(full));
}

void require_consistent(const data::Dataset &d) {
  auto conflicts = data::check_consistency(d);
  if (conflicts.empty())
    return;
  std::string msg = "dataset is inconsistent: examples";
  for (auto q : conflicts.front())
    msg += " " + std::to_string(q + 1);
  msg += " share features but not labels";
  throw InconsistentDataError(msg, std::move(conflicts));
}

bdd::TruthTable constant_table(const data::Dataset &d) {
  // Majority label; a tie gives 0.
  return bdd::TruthTable(2 * d.count_positive() > d.size() ? "1" : "0");
}

double gini(std::size_t pos, std::size_t n) {
  if (n == 0)
    return 0.0;
  const double p = static_cast<double>(pos) / static_cast<double>(n);
  return 2.0 * p * (1.0 - p);
}

void grow(const data::Dataset &d, const std::vector<std::size_t> &idx,
          std::size_t depth, std::size_t max_depth, std::size_t min_leaf,
          std::vector<bool> &used) {
  if (depth >= max_depth || idx.size() < 2 * min_leaf)
    return;
  std::size_t pos = 0;
  for (auto q : idx)
    pos += d.label(q);
  if (pos == 0 || pos == idx.size())
    return;

  const auto n = static_cast<double>(idx.size());
  std::optional<std::size_t> best;
  double best_score = 0.0;
  for (std::size_t r = 0; r < d.num_features(); ++r) {
    std::size_t n1 = 0;
    std::size_t p1 = 0;
    for (auto q : idx)
      if (d.feature(q, r) != 0) {
        ++n1;
        p1 += d.label(q);
      }
    const std::size_t n0 = idx.size() - n1;
    if (n0 < min_leaf || n1 < min_leaf || n0 == 0 || n1 == 0)
      continue;
    const double score = (static_cast<double>(n0) * gini(pos - p1, n0) +
                          static_cast<double>(n1) * gini(p1, n1)) /
                         n;
    if (!best || score < best_score - 1e-12) {
      best = r;
      best_score = score;
    }
  }
  if (!best)
    return;
  used[*best] = true;
  std::vector<std::size_t> left;
  std::vector<std::size_t> right;
  for (auto q : idx)
    (d.feature(q, *best) != 0 ? right : left).push_back(q);
  grow(d, left, depth + 1, max_depth, min_leaf, used);
  grow(d, right, depth + 1, max_depth, min_leaf, used);
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

} // namespace

LearnedModel assemble_model(const data::Dataset &train,
                            const bdd::FeatureOrdering &ordering,
                            const bdd::TruthTable &solver_table,
                            post::BiasPolicy bias) {
  LearnedModel m;
  m.ordering = ordering;
  m.solver_table = solver_table.cells();
  m.bias = bias;
  const auto ext = post::mark_unknown(solver_table, ordering, train);
  if (bias == post::BiasPolicy::C) {
    auto merged = post::apply_bias_C(ext, ordering);
    m.table = std::move(merged.table);
    m.bdd = std::move(merged.bdd);
  } else {
    m.table = post::apply_bias(ext, bias, ordering);
    m.bdd = bdd::gen_bdd(m.table, ordering);
  }
  for (std::size_t q = 0; q < train.size(); ++q)
    if (bdd::classify(m.bdd, train.row(q)) != train.label(q))
      ++m.train_errors;
  m.train_accuracy =
      train.empty() ? 1.0
                    : 1.0 - static_cast<double>(m.train_errors) /
                                static_cast<double>(train.size());
  m.feature_names = train.feature_names();
  m.label_values = train.label_values();
  return m;
}

LearnedModel learn(const data::Dataset &d, const LearnConfig &cfg) {
  if (cfg.depth < 1)
    throw std::invalid_argument("depth must be at least 1");
  if (!(cfg.budget_seconds > 0.0))
    throw std::invalid_argument("budget must be positive");
  if (d.empty())
    throw DataError("empty training set");

  const auto pos = d.count_positive();
  if (pos == 0 || pos == d.size()) {
    auto m = assemble_model(d, bdd::FeatureOrdering{}, constant_table(d), cfg.bias);
    m.mode = cfg.mode;
    m.requested_depth = cfg.depth;
    m.optimal = true;
    return m;
  }

  std::vector<std::size_t> candidates;
  if (cfg.preselect.enabled)
    candidates = preselect_features(
        d, cfg.preselect.max_depth ? cfg.preselect.max_depth : 2 * cfg.depth,
        cfg.preselect.min_leaf);
  if (candidates.empty())
    candidates = all_features(d.num_features());

  const std::size_t h = std::min(cfg.depth, candidates.size());
  if (h == 0) {
    // No features: only a constant classifier exists.
    if (cfg.mode == Mode::sat)
      require_consistent(d);
    auto m = assemble_model(d, bdd::FeatureOrdering{}, constant_table(d), cfg.bias);
    m.mode = cfg.mode;
    m.requested_depth = cfg.depth;
    m.optimal = true;
    return m;
  }

  const auto sub = d.select_features(candidates);
  const auto enc = cfg.mode == Mode::sat ? encode::encode_bdd2(sub, h)
                                         : encode::encode_maxsat(sub, h);
  const auto t0 = Clock::now();
  const auto outcome = run_solver(enc.formula, cfg, cfg.budget_seconds);
  const double elapsed = seconds_since(t0);

  switch (outcome.kind) {
  case SolveOutcome::Kind::unsat:
    if (cfg.mode == Mode::sat)
      throw LearnError(LearnError::Kind::depth_insufficient,
                       "no perfect classifier exists at depth " +
                           std::to_string(h));
    throw LearnError(LearnError::Kind::solver_failure,
                     "MaxSAT hard clauses reported unsatisfiable");
  case SolveOutcome::Kind::timeout:
    throw LearnError(LearnError::Kind::timeout,
                     "solver budget exhausted before any model was found");
  case SolveOutcome::Kind::model:
    break;
  }

  const auto decoded = encode::decode(outcome.model, enc.context);
  auto m = assemble_model(d, lift(decoded.ordering, candidates), decoded.table,
                          cfg.bias);
  m.mode = cfg.mode;
  m.requested_depth = cfg.depth;
  m.optimal = outcome.optimal;
  m.stats = outcome.stats;
  m.solve_seconds = elapsed;
  m.literal_count = cnf::literal_count(enc.formula);
  m.candidate_features = candidates;

  if (cfg.mode == Mode::sat && m.train_errors != 0)
    throw std::logic_error("SAT model misclassifies a training example");
  if (cfg.mode == Mode::maxsat && m.train_errors != outcome.cost)
    throw std::logic_error("decoded classifier disagrees with the MaxSAT cost");
  return m;
}

double evaluate(const LearnedModel &m, const data::Dataset &test) {
  if (test.empty())
    throw DataError("empty test set");
  if (test.num_features() != m.feature_names.size() ||
      test.feature_names() != m.feature_names)
    throw DataError("feature mismatch: test data has " +
                    std::to_string(test.num_features()) +
                    " features, model expects " +
                    std::to_string(m.feature_names.size()));
  std::size_t correct = 0;
  for (std::size_t q = 0; q < test.size(); ++q)
    if (bdd::classify(m.bdd, test.row(q)) == test.label(q))
      ++correct;
  return static_cast<double>(correct) / static_cast<double>(test.size());
}

std::vector<std::size_t> preselect_features(const data::Dataset &d,
                                            std::size_t max_depth,
                                            std::size_t min_leaf) {
  if (max_depth < 1)
    throw std::invalid_argument("max_depth must be at least 1");
  std::vector<bool> used(d.num_features(), false);
  grow(d, all_features(d.size()), 0, max_depth, std::max<std::size_t>(min_leaf, 1),
       used);
  std::vector<std::size_t> out;
  for (std::size_t r = 0; r < used.size(); ++r)
    if (used[r])
      out.push_back(r);
  return out;
}

MinDepthResult min_depth(const data::Dataset &d, std::size_t h0,
                         const LearnConfig &cfg, bool binary) {
  if (h0 < 1)
    throw std::invalid_argument("initial depth must be at least 1");
  if (d.empty())
    throw DataError("empty training set");
  require_consistent(d);

  MinDepthResult result;
  const auto pos = d.count_positive();
  if (pos == 0 || pos == d.size()) {
    result.witness =
        assemble_model(d, bdd::FeatureOrdering{}, constant_table(d), post::BiasPolicy::S);
    result.witness.mode = Mode::sat;
    result.witness.optimal = true;
    return result;
  }

  const std::size_t k = d.num_features();
  const auto start = Clock::now();
  const auto features = all_features(k);
  std::optional<LearnedModel> witness;

  auto probe = [&](std::size_t h) {
    const double left = cfg.budget_seconds - seconds_since(start);
    if (left <= 0.0)
      throw LearnError(LearnError::Kind::timeout, "min_depth budget exhausted");
    const auto enc = encode::encode_bdd2(d, h);
    const auto t0 = Clock::now();
    const auto outcome = run_solver(enc.formula, cfg, left);
    if (outcome.kind == SolveOutcome::Kind::timeout)
      throw LearnError(LearnError::Kind::timeout,
                       "solver budget exhausted at depth " + std::to_string(h));
    const bool sat = outcome.kind == SolveOutcome::Kind::model;
    result.probes.push_back({h, sat ? solve::SatStatus::sat : solve::SatStatus::unsat});
    if (sat) {
      const auto decoded = encode::decode(outcome.model, enc.context);
      auto m = assemble_model(d, decoded.ordering, decoded.table, post::BiasPolicy::S);
      if (m.train_errors != 0)
        throw std::logic_error("SAT witness misclassifies a training example");
      m.mode = Mode::sat;
      m.requested_depth = h;
      m.optimal = true;
      m.stats = outcome.stats;
      m.solve_seconds = seconds_since(t0);
      m.literal_count = cnf::literal_count(enc.formula);
      m.candidate_features = features;
      witness = std::move(m);
    }
    return sat;
  };

  // Depth 0 (a constant) cannot separate two labels.
  std::size_t lo = 0;
  std::size_t hi = 0;
  if (binary) {
    if (!probe(k))
      throw std::logic_error("consistent dataset not separable at depth K");
    hi = k;
    while (hi - lo > 1) {
      const std::size_t mid = lo + (hi - lo) / 2;
      if (probe(mid))
        hi = mid;
      else
        lo = mid;
    }
  } else {
    std::size_t h = std::clamp<std::size_t>(h0, 1, k);
    if (probe(h)) {
      hi = h;
      while (hi > 1 && probe(hi - 1))
        --hi;
      lo = hi - 1;
    } else {
      lo = h;
      while (lo < k && !probe(lo + 1))
        ++lo;
      if (lo == k)
        throw std::logic_error("consistent dataset not separable at depth K");
      hi = lo + 1;
    }
  }
  // The witness must belong to the final depth.
  if (!witness || witness->table.order() != hi)
    probe(hi);
  result.depth = hi;
  result.unsat_depth = lo;
  result.witness = std::move(*witness);
  return result;
}

std::uint64_t fold_seed(std::uint64_t seed, std::size_t fold) noexcept {
  return splitmix64(splitmix64(seed) ^ static_cast<std::uint64_t>(fold));
}

CvReport cross_validate(const data::Dataset &d, const LearnConfig &cfg,
                        std::size_t k, const std::vector<std::uint64_t> &seeds,
                        std::size_t threads) {
  if (seeds.empty())
    throw std::invalid_argument("at least one seed is required");
  CvReport report;
  report.k = k;
  report.seeds = seeds;

  struct Job {
    data::Split split;
    std::size_t fold;
  };
  std::vector<Job> jobs;
  for (auto seed : seeds) {
    auto splits = data::kfold(d, k, seed);
    for (std::size_t f = 0; f < splits.size(); ++f)
      jobs.push_back({std::move(splits[f]), f});
  }
  report.runs.resize(jobs.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      const auto &job = jobs[i];
      CvRun run;
      run.seed = job.split.seed;
      run.fold = job.fold;
      run.solver_seed = fold_seed(job.split.seed, job.fold);
      try {
        auto fold_cfg = cfg;
        fold_cfg.seed = run.solver_seed;
        const auto train = d.subset(job.split.train);
        const auto test = d.subset(job.split.test);
        const auto m = learn(train, fold_cfg);
        run.train_accuracy = m.train_accuracy;
        run.test_accuracy = evaluate(m, test);
        run.nodes = m.bdd.node_count();
        run.literal_count = m.literal_count;
        run.seconds = m.solve_seconds;
        run.optimal = m.optimal;
        run.ok = true;
      } catch (const std::exception &e) {
        run.error = e.what();
      }
      report.runs[i] = std::move(run);
    }
  };

  if (threads == 0)
    threads = std::max(1U, std::thread::hardware_concurrency());
  threads = std::min(threads, jobs.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t)
    pool.emplace_back(worker);
  worker();
  for (auto &t : pool)
    t.join();

  auto &agg = report.aggregate;
  agg.runs = report.runs.size();
  std::size_t optimal = 0;
  for (const auto &r : report.runs) {
    if (!r.ok) {
      ++agg.failures;
      continue;
    }
    agg.train_accuracy += r.train_accuracy;
    agg.test_accuracy += r.test_accuracy;
    agg.nodes += static_cast<double>(r.nodes);
    agg.literal_count += static_cast<double>(r.literal_count);
    agg.seconds += r.seconds;
    optimal += r.optimal ? 1 : 0;
  }
  const std::size_t ok = agg.runs - agg.failures;
  if (ok > 0) {
    const auto n = static_cast<double>(ok);
    agg.train_accuracy /= n;
    agg.test_accuracy /= n;
    agg.nodes /= n;
    agg.literal_count /= n;
    agg.seconds /= n;
  }
  agg.optimal_rate = agg.runs == 0 ? 0.0
                                   : static_cast<double>(optimal) /
                                         static_cast<double>(agg.runs);
  return report;
}

} // namespace bddlearn::search
