#include <doctest.h>

#include "bddlearn/errors.hpp"
#include "bddlearn/search.hpp"
#include "support.hpp"

using namespace bddlearn;
using namespace bddlearn::search;

namespace {

// Label is the parity of features 1, 2 and 4 over all 32 rows.
data::Dataset parity5() {
  std::vector<std::vector<std::uint8_t>> rows;
  std::vector<std::uint8_t> labels;
  for (unsigned x = 0; x < 32; ++x) {
    std::vector<std::uint8_t> row(5);
    for (unsigned r = 0; r < 5; ++r)
      row[r] = (x >> r) & 1U;
    rows.push_back(row);
    labels.push_back(row[1] ^ row[2] ^ row[4]);
  }
  return data::Dataset::from_rows(rows, labels);
}

LearnConfig sat_cfg(std::size_t depth) {
  LearnConfig c;
  c.depth = depth;
  c.mode = Mode::sat;
  c.budget_seconds = 60;
  return c;
}

LearnError::Kind learn_error_kind(const data::Dataset &d, const LearnConfig &c) {
  try {
    learn(d, c);
  } catch (const LearnError &e) {
    return e.kind;
  }
  FAIL("learn did not throw");
  return LearnError::Kind::solver_failure;
}

} // namespace

TEST_SUITE("search") {
  TEST_CASE("perfect classifier of the running dataset") {
    const auto d = testing::table1();
    const auto m = learn(d, sat_cfg(2));
    CHECK(m.train_errors == 0);
    CHECK(m.train_accuracy == 1.0);
    CHECK(m.ordering.size() == 2);
    CHECK(m.optimal);
    CHECK(bdd::audit(m.bdd).empty());
    CHECK(m.literal_count > 0);
    CHECK(learn_error_kind(d, sat_cfg(1)) == LearnError::Kind::depth_insufficient);
  }

  TEST_CASE("sat mode refuses inconsistent data, maxsat absorbs it") {
    const auto d = data::Dataset::from_rows({{0, 1}, {0, 1}, {1, 0}}, {1, 0, 0});
    CHECK_THROWS_AS(learn(d, sat_cfg(1)), InconsistentDataError);
    LearnConfig c;
    c.depth = 1;
    const auto m = learn(d, c);
    CHECK(m.train_errors == 1);
  }

  TEST_CASE("maxsat training error equals the oracle optimum") {
    std::mt19937_64 rng(41);
    for (int t = 0; t < 8; ++t) {
      const auto d = testing::random_dataset(rng, 5, 16);
      for (auto bias : {post::BiasPolicy::P, post::BiasPolicy::C, post::BiasPolicy::S}) {
        LearnConfig c;
        c.depth = 2;
        c.bias = bias;
        const auto m = learn(d, c);
        CHECK(m.optimal);
        CHECK(m.train_errors == testing::bdd_optimum(d, 2).errors);
        CHECK(bdd::audit(m.bdd).empty());
      }
    }
  }

  TEST_CASE("degenerate inputs") {
    CHECK_THROWS_AS(learn(data::Dataset::from_rows({}, {}, {"a"}), LearnConfig{}), DataError);
    LearnConfig zero;
    zero.depth = 0;
    CHECK_THROWS(learn(testing::table1(), zero));

    const auto one = data::Dataset::from_rows({{0, 1}, {1, 1}}, {1, 1});
    const auto m = learn(one, sat_cfg(2));
    CHECK(m.table.cells() == "1");
    CHECK(m.bdd.node_count() == 1);
    CHECK(m.train_errors == 0);

    // Depth beyond the feature count is clamped.
    const auto two = data::Dataset::from_rows({{0, 0}, {0, 1}, {1, 0}, {1, 1}}, {0, 1, 1, 0});
    const auto c = learn(two, sat_cfg(5));
    CHECK(c.table.order() == 2);
    CHECK(c.requested_depth == 5);
    CHECK(c.train_errors == 0);
  }

  TEST_CASE("learning is reproducible for a seed") {
    std::mt19937_64 rng(3);
    const auto d = testing::random_dataset(rng, 6, 30);
    LearnConfig c;
    c.depth = 3;
    c.seed = 9;
    const auto a = learn(d, c);
    const auto b = learn(d, c);
    CHECK(a.ordering == b.ordering);
    CHECK(a.table == b.table);
    CHECK(a.stats.same_search(b.stats));
  }

  TEST_CASE("a tiny budget times out") {
    std::mt19937_64 rng(6);
    const auto d = testing::random_dataset(rng, 14, 300);
    LearnConfig c;
    c.depth = 6;
    c.budget_seconds = 1e-6;
    CHECK(learn_error_kind(d, c) == LearnError::Kind::timeout);
  }

  TEST_CASE("evaluation") {
    const auto d = testing::table1();
    const auto m = learn(d, sat_cfg(2));
    CHECK(evaluate(m, d) == 1.0);
    const auto flipped = data::Dataset::from_rows({{1, 0, 1, 0}, {0, 0, 1, 0}}, {1, 1});
    CHECK(evaluate(m, flipped) == 0.5);
    CHECK_THROWS_AS(evaluate(m, d.subset(std::vector<std::size_t>{})), DataError);
    CHECK_THROWS_AS(evaluate(m, d.select_features(std::vector<std::size_t>{0, 1})), DataError);
  }

  TEST_CASE("cart preselection") {
    // Label copies feature 1; the other features are noise.
    std::mt19937_64 rng(13);
    auto noisy = testing::random_dataset(rng, 5, 40);
    std::vector<std::vector<std::uint8_t>> rows;
    std::vector<std::uint8_t> labels;
    for (std::size_t q = 0; q < noisy.size(); ++q) {
      const auto r = noisy.row(q);
      rows.emplace_back(r.begin(), r.end());
      labels.push_back(r[1]);
    }
    const auto copy = data::Dataset::from_rows(rows, labels);
    CHECK(preselect_features(copy, 4) == std::vector<std::size_t>{1});

    // XOR has no informative first split; the zero-gain tie goes to feature 0.
    const auto x = data::Dataset::from_rows({{0, 0}, {0, 1}, {1, 0}, {1, 1}}, {0, 1, 1, 0});
    CHECK(preselect_features(x, 2) == std::vector<std::size_t>{0, 1});
    CHECK(preselect_features(x, 1) == std::vector<std::size_t>{0});
    // Leaves of two examples cannot be split again.
    CHECK(preselect_features(x, 2, 2) == std::vector<std::size_t>{0});
    CHECK_THROWS(preselect_features(x, 0));
  }

  TEST_CASE("learning over preselected features") {
    const auto d = parity5();
    LearnConfig c = sat_cfg(3);
    c.preselect.enabled = true;
    const auto m = learn(d, c);
    for (auto r : m.ordering)
      CHECK(std::find(m.candidate_features.begin(), m.candidate_features.end(), r) !=
            m.candidate_features.end());
    CHECK(m.train_errors == 0);
    std::vector<std::size_t> used(m.ordering.begin(), m.ordering.end());
    std::sort(used.begin(), used.end());
    CHECK(used == std::vector<std::size_t>{1, 2, 4});
  }

  TEST_CASE("minimum depth") {
    const auto t1 = testing::table1();
    for (bool binary : {false, true}) {
      const auto r = min_depth(t1, 4, sat_cfg(1), binary);
      CHECK(r.depth == 2);
      REQUIRE(r.unsat_depth);
      CHECK(*r.unsat_depth == 1);
      CHECK(r.witness.train_errors == 0);
      CHECK(r.witness.table.order() == 2);
    }
    const auto up = min_depth(t1, 1, sat_cfg(1));
    CHECK(up.depth == 2);
    CHECK(up.probes.size() == 2);

    const auto p = parity5();
    const auto r = min_depth(p, 1, sat_cfg(1));
    CHECK(r.depth == 3);
    CHECK(testing::separable(p, 3));
    CHECK_FALSE(testing::separable(p, 2));

    const auto single = data::Dataset::from_rows({{0}, {1}}, {0, 0});
    const auto s = min_depth(single, 3, sat_cfg(1));
    CHECK(s.depth == 0);
    CHECK(s.probes.empty());

    const auto bad = data::Dataset::from_rows({{0}, {0}}, {0, 1});
    CHECK_THROWS_AS(min_depth(bad, 1, sat_cfg(1)), InconsistentDataError);
    CHECK_THROWS(min_depth(t1, 0, sat_cfg(1)));
  }

  TEST_CASE("minimum depth agrees with the separability oracle") {
    std::mt19937_64 rng(77);
    for (int t = 0; t < 15; ++t) {
      const auto d = testing::random_dataset(rng, 5, 10, true);
      if (d.count_positive() == 0 || d.count_positive() == d.size())
        continue;
      const auto r = min_depth(d, 2, sat_cfg(1));
      CHECK(testing::separable(d, r.depth));
      CHECK_FALSE(testing::separable(d, r.depth - 1));
    }
  }

  TEST_CASE("fold seeds") {
    CHECK(fold_seed(1, 0) == fold_seed(1, 0));
    CHECK(fold_seed(1, 0) != fold_seed(1, 1));
    CHECK(fold_seed(1, 0) != fold_seed(2, 0));
  }

  TEST_CASE("cross validation is independent of the thread count") {
    const auto d = testing::table1();
    LearnConfig c;
    c.depth = 2;
    const auto a = cross_validate(d, c, 4, {1, 2}, 1);
    const auto b = cross_validate(d, c, 4, {1, 2}, 3);
    REQUIRE(a.runs.size() == 8);
    REQUIRE(b.runs.size() == 8);
    for (std::size_t i = 0; i < 8; ++i) {
      CHECK(a.runs[i].ok);
      CHECK(a.runs[i].seed == b.runs[i].seed);
      CHECK(a.runs[i].fold == b.runs[i].fold);
      CHECK(a.runs[i].test_accuracy == b.runs[i].test_accuracy);
      CHECK(a.runs[i].nodes == b.runs[i].nodes);
      CHECK(a.runs[i].solver_seed == fold_seed(a.runs[i].seed, a.runs[i].fold));
    }
    CHECK(a.aggregate.runs == 8);
    CHECK(a.aggregate.failures == 0);
    CHECK(a.aggregate.optimal_rate == 1.0);
    CHECK(a.aggregate.test_accuracy == b.aggregate.test_accuracy);
    CHECK_THROWS(cross_validate(d, c, 4, {}, 1));
  }

  TEST_CASE("cross validation records failures") {
    // Fold training sets can become inconsistent in SAT mode.
    const auto d = data::Dataset::from_rows({{0}, {0}, {1}, {1}}, {0, 1, 0, 1});
    const auto r = cross_validate(d, sat_cfg(1), 2, {5}, 1);
    CHECK(r.aggregate.runs == 2);
    for (const auto &run : r.runs)
      if (!run.ok)
        CHECK_FALSE(run.error.empty());
  }
}
