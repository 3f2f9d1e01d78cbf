#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "bddlearn/bdd.hpp"
#include "bddlearn/data.hpp"
#include "bddlearn/postprocess.hpp"
#include "bddlearn/sat_solver.hpp"
#include "bddlearn/truth_table.hpp"

namespace bddlearn::search {

enum class Mode { sat, maxsat };

struct PreselectConfig {
  bool enabled = false;
  /// 0 means twice the learning depth.
  std::size_t max_depth = 0;
  std::size_t min_leaf = 1;
};

struct SolverConfig {
  /// Empty: embedded solver. Otherwise a command template with "{file}".
  std::string external_command;
  std::filesystem::path workdir = std::filesystem::temp_directory_path();
};

struct LearnConfig {
  std::size_t depth = 2;
  Mode mode = Mode::maxsat;
  post::BiasPolicy bias = post::BiasPolicy::S;
  PreselectConfig preselect;
  SolverConfig solver;
  double budget_seconds = 900.0;
  std::uint64_t seed = 0;
};

struct LearnedModel {
  /// Indices into the full training feature set.
  bdd::FeatureOrdering ordering;
  /// Post-bias table.
  bdd::TruthTable table;
  /// Table as decoded from the solver, before marking and bias.
  std::string solver_table;
  bdd::Bdd bdd;
  post::BiasPolicy bias = post::BiasPolicy::S;
  Mode mode = Mode::maxsat;
  /// Requested depth; `table.order()` may be smaller when fewer features
  /// are available.
  std::size_t requested_depth = 0;
  double train_accuracy = 0.0;
  std::size_t train_errors = 0;
  bool optimal = false;
  solve::SolverStats stats;
  double solve_seconds = 0.0;
  std::uint64_t literal_count = 0;
  /// Features offered to the encoder (all, or the preselected subset).
  std::vector<std::size_t> candidate_features;
  std::vector<std::string> feature_names;
  std::vector<std::string> label_values;
};

/// Throws LearnError (depth_insufficient in SAT mode when UNSAT, timeout,
/// solver_failure), InconsistentDataError in SAT mode, DataError on an
/// empty training set.
LearnedModel learn(const data::Dataset &d, const LearnConfig &cfg);

/// Builds the model for a known ordering and solver table.
LearnedModel assemble_model(const data::Dataset &train,
                            const bdd::FeatureOrdering &ordering,
                            const bdd::TruthTable &solver_table,
                            post::BiasPolicy bias);

/// Fraction of `test` examples the model's diagram classifies correctly.
/// Throws DataError on an empty test set or a feature mismatch.
double evaluate(const LearnedModel &m, const data::Dataset &test);

/// Gini CART; returns the sorted set of features used by internal nodes.
/// Ties go to the lowest feature index.
std::vector<std::size_t> preselect_features(const data::Dataset &d,
                                            std::size_t max_depth,
                                            std::size_t min_leaf = 1);

struct DepthProbe {
  std::size_t depth = 0;
  solve::SatStatus status = solve::SatStatus::timeout;
};

struct MinDepthResult {
  std::size_t depth = 0;
  /// Perfect classifier at `depth` (bias S).
  LearnedModel witness;
  /// Depth proven UNSAT, depth - 1 when depth > 0. Depth 0 is UNSAT by
  /// the presence of both labels.
  std::optional<std::size_t> unsat_depth;
  std::vector<DepthProbe> probes;
};

/// Smallest H with a perfect classifier, by linear search from `h0`
/// (clamped to [1, K]). `binary` switches to bisection over [1, K].
MinDepthResult min_depth(const data::Dataset &d, std::size_t h0,
                         const LearnConfig &cfg, bool binary = false);

struct CvRun {
  std::uint64_t seed = 0;
  std::size_t fold = 0;
  std::uint64_t solver_seed = 0;
  bool ok = false;
  std::string error;
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
  std::size_t nodes = 0;
  std::uint64_t literal_count = 0;
  double seconds = 0.0;
  bool optimal = false;
};

struct CvAggregate {
  std::size_t runs = 0;
  std::size_t failures = 0;
  /// Means over successful runs.
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
  double nodes = 0.0;
  double literal_count = 0.0;
  double seconds = 0.0;
  /// Optimal runs over all runs.
  double optimal_rate = 0.0;
};

struct CvReport {
  std::size_t k = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<CvRun> runs;
  CvAggregate aggregate;
};

/// Solver seed for a fold; depends only on (seed, fold).
std::uint64_t fold_seed(std::uint64_t seed, std::size_t fold) noexcept;

/// k folds per seed, run on up to `threads` workers (0 = hardware
/// concurrency). Failed runs are recorded, not thrown.
CvReport cross_validate(const data::Dataset &d, const LearnConfig &cfg,
                        std::size_t k, const std::vector<std::uint64_t> &seeds,
                        std::size_t threads = 0);

} // namespace bddlearn::search
