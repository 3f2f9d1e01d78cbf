#include <doctest.h>

#include <algorithm>
#include <set>

#include "bddlearn/encode.hpp"
#include "bddlearn/errors.hpp"
#include "bddlearn/maxsat.hpp"
#include "bddlearn/sat_solver.hpp"
#include "support.hpp"

using namespace bddlearn;
using namespace bddlearn::encode;
using cnf::Lit;

namespace {

std::set<Lit> as_set(const cnf::Clause &c) { return {c.begin(), c.end()}; }

bool has_clause(const cnf::Formula &f, const cnf::Clause &want) {
  const auto w = as_set(want);
  return std::any_of(f.hard().begin(), f.hard().end(),
                     [&](const cnf::Clause &c) { return as_set(c) == w; });
}

// Table as read from the decoded model must classify every example.
void check_perfect(const data::Dataset &d, const Decoded &dec) {
  for (std::size_t q = 0; q < d.size(); ++q) {
    std::size_t j = 0;
    for (auto r : dec.ordering)
      j = 2 * j + d.feature(q, r);
    CHECK(dec.table[j] - '0' == d.label(q));
  }
}

cnf::Model table2_assignment(const EncodingContext &ctx) {
  cnf::Model m(ctx.semantic_vars());
  m.set(ctx.feature_at(0, 0), true);
  m.set(ctx.feature_at(1, 1), true);
  m.set(ctx.cell(0), true);
  return m;
}

} // namespace

TEST_SUITE("encode") {
  TEST_CASE("cell bits follow the binary expansion") {
    CHECK(bdd::cell_bit(0, 0, 2) == 0);
    CHECK(bdd::cell_bit(1, 3, 2) == 1);
    CHECK(bdd::cell_bit(1, 0, 2) == 0);
    CHECK(bdd::cell_bit(0, 5, 3) == 1);
    CHECK(bdd::cell_bit(1, 5, 3) == 0);
    CHECK(bdd::cell_bit(2, 5, 3) == 1);
    CHECK_THROWS_AS((void)bdd::cell_bit(2, 0, 2), std::out_of_range);
    CHECK_THROWS_AS((void)bdd::cell_bit(0, 4, 2), std::out_of_range);
  }

  TEST_CASE("variable layout is dense and distinct") {
    const EncodingContext ctx(Variant::bdd2, 2, 4, 8);
    std::set<cnf::Var> vars;
    for (std::size_t r = 0; r < 4; ++r)
      for (std::size_t i = 0; i < 2; ++i)
        vars.insert(ctx.feature_at(r, i));
    for (std::size_t j = 0; j < 4; ++j)
      vars.insert(ctx.cell(j));
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t q = 0; q < 8; ++q)
        vars.insert(ctx.feature_value(i, q));
    CHECK(vars.size() == 8 + 4 + 16);
    CHECK(*vars.begin() == 1);
    CHECK(*vars.rbegin() == ctx.semantic_vars());
    const EncodingContext c1(Variant::bdd1, 2, 4, 8);
    CHECK_THROWS((void)c1.feature_value(0, 0));
    CHECK(c1.semantic_vars() == 12);
  }

  TEST_CASE("direct classification clause of the first negative example") {
    const auto d = testing::table1();
    const auto e = encode_bdd1(d, 2);
    const auto &ctx = e.context;
    CHECK(has_clause(e.formula, {Lit::neg(ctx.cell(0)), Lit::pos(ctx.feature_at(0, 0)),
                                 Lit::pos(ctx.feature_at(2, 0)),
                                 Lit::pos(ctx.feature_at(0, 1)),
                                 Lit::pos(ctx.feature_at(2, 1))}));
  }

  TEST_CASE("direct encoding literal count matches the closed form") {
    std::mt19937_64 rng(11);
    for (std::size_t h = 2; h <= 5; ++h) {
      const auto d = testing::random_dataset(rng, 6, 15, true);
      const auto empty = d.subset(std::vector<std::size_t>{});
      const auto structural = cnf::literal_count(encode_bdd1(empty, h).formula);
      std::uint64_t expected = 0;
      for (std::size_t q = 0; q < d.size(); ++q)
        for (std::size_t j = 0; j < (std::size_t{1} << h); ++j) {
          expected += 1;
          for (std::size_t i = 0; i < h; ++i)
            for (std::size_t r = 0; r < d.num_features(); ++r)
              expected += d.feature(q, r) != ((j >> (h - 1 - i)) & 1U);
        }
      CHECK(cnf::literal_count(encode_bdd1(d, h).formula) - structural == expected);
    }
  }

  TEST_CASE("no examples leaves only structure, which any ordering satisfies") {
    const auto d = data::Dataset::from_rows({}, {}, {"a", "b", "c"});
    const auto e = encode_bdd1(d, 2);
    const auto r = solve::sat_solve(e.formula);
    REQUIRE(r.status == solve::SatStatus::sat);
    const auto dec = decode(*r.model, e.context);
    CHECK(dec.ordering.size() == 2);
    CHECK(dec.table.cells().substr(0, 2) != dec.table.cells().substr(2));
  }

  TEST_CASE("feature-value encoding: clause width and hand-checked model") {
    const auto d = testing::table1();
    const auto e = encode_bdd2(d, 3);
    const auto &ctx = e.context;
    // Classification clauses are the ones mentioning feature-value vars in
    // more than one literal.
    std::size_t classification = 0;
    for (const auto &c : e.formula.hard()) {
      const auto fv = std::count_if(c.begin(), c.end(), [&](Lit l) {
        return l.var() >= ctx.feature_value(0, 0) && l.var() <= ctx.semantic_vars();
      });
      if (fv > 1) {
        ++classification;
        CHECK(c.size() == 4);
      }
    }
    CHECK(classification == 8 * 8);

    const auto one = data::Dataset::from_rows({{1}}, {1});
    const auto small = encode_bdd2(one, 1);
    const auto sc = small.context;
    std::size_t models = 0;
    const auto n = small.formula.var_count();
    REQUIRE(n <= 20);
    const auto masks = testing::to_masks(small.formula.hard());
    for (std::uint32_t a = 0; a < (1U << n); ++a) {
      if (!std::all_of(masks.begin(), masks.end(),
                       [&](const testing::MaskClause &c) { return testing::mask_sat(c, a); }))
        continue;
      ++models;
      auto bit = [&](cnf::Var v) { return (a >> (v - 1)) & 1U; };
      CHECK(bit(sc.feature_at(0, 0)) == 1);
      CHECK(bit(sc.feature_value(0, 0)) == 1);
      CHECK(bit(sc.cell(1)) == 1);
      CHECK(bit(sc.cell(0)) == 0);
    }
    CHECK(models > 0);
  }

  TEST_CASE("running dataset at depth 2 is perfectly classifiable") {
    const auto d = testing::table1();
    for (auto enc : {encode_bdd1(d, 2), encode_bdd2(d, 2)}) {
      const auto r = solve::sat_solve(enc.formula);
      REQUIRE(r.status == solve::SatStatus::sat);
      check_perfect(d, decode(*r.model, enc.context));
    }
    for (auto enc : {encode_bdd1(d, 1), encode_bdd2(d, 1)})
      CHECK(solve::sat_solve(enc.formula).status == solve::SatStatus::unsat);
  }

  TEST_CASE("decoding a known depth-2 solution") {
    const auto d = testing::table1();
    const auto e = encode_bdd2(d, 2);
    const auto m = table2_assignment(e.context);
    const auto dec = decode(m, e.context);
    CHECK(dec.ordering.features() == std::vector<std::size_t>{0, 1});
    CHECK(dec.table.cells() == "1000");
    check_perfect(d, dec);

    auto corrupt = m;
    corrupt.set(e.context.feature_at(2, 0), true);
    CHECK_THROWS_AS(decode(corrupt, e.context), std::runtime_error);
    auto none = m;
    none.set(e.context.feature_at(1, 1), false);
    CHECK_THROWS_AS(decode(none, e.context), std::runtime_error);
  }

  TEST_CASE("perfect encodings refuse inconsistent data") {
    const auto d = data::Dataset::from_rows({{0}, {0}}, {1, 0});
    CHECK_THROWS_AS(encode_bdd1(d, 1), InconsistentDataError);
    CHECK_THROWS_AS(encode_bdd2(d, 1), InconsistentDataError);
    const auto e = encode_maxsat(d, 1);
    const auto r = solve::maxsat_solve(e.formula);
    CHECK(r.status == solve::MaxSatStatus::optimum);
    CHECK(r.cost == 1);
    CHECK(testing::brute_maxsat(e.formula) == 1);
  }

  TEST_CASE("every model of either encoding classifies perfectly") {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 20; ++t) {
      const auto d = testing::random_dataset(rng, 4, 8, true);
      for (std::size_t h = 1; h <= 3; ++h)
        for (auto enc : {encode_bdd1(d, h), encode_bdd2(d, h)}) {
          const auto r = solve::sat_solve(enc.formula, {60.0, static_cast<std::uint64_t>(t), 0});
          CHECK(r.status != solve::SatStatus::timeout);
          if (r.status != solve::SatStatus::sat)
            continue;
          const auto dec = decode(*r.model, enc.context);
          check_perfect(d, dec);
          const auto &cells = dec.table.cells();
          CHECK(cells.substr(0, cells.size() / 2) != cells.substr(cells.size() / 2));
        }
    }
  }

  TEST_CASE("maxsat optimum equals the ordering oracle") {
    std::mt19937_64 rng(21);
    for (int t = 0; t < 10; ++t) {
      const auto d = testing::random_dataset(rng, 5, 20);
      const auto e = encode_maxsat(d, 2);
      const auto r = solve::maxsat_solve(e.formula);
      REQUIRE(r.status == solve::MaxSatStatus::optimum);
      CHECK(r.cost == testing::bdd_optimum(d, 2).errors);

      // Soft clauses come in blocks of 2^H per example; an example's block
      // is fully satisfied exactly when the decoded classifier is right.
      const auto dec = decode(*r.model, e.context);
      for (std::size_t q = 0; q < d.size(); ++q) {
        bool all = true;
        for (std::size_t j = 0; j < 4; ++j)
          all = all && cnf::satisfies(e.formula.soft()[q * 4 + j].lits, *r.model);
        const auto cell = testing::cell_of(d, q, dec.ordering.features());
        CHECK(all == (dec.table[cell] - '0' == d.label(q)));
      }
    }
  }

  TEST_CASE("example weights scale the soft clauses") {
    const auto d = data::Dataset::from_rows({{0}, {0}}, {1, 0});
    const std::vector<std::uint64_t> w{3, 1};
    const auto e = encode_maxsat(d, 1, w);
    CHECK(e.formula.soft()[0].weight == 3);
    CHECK(e.formula.soft()[2].weight == 1);
    CHECK(testing::brute_maxsat(e.formula) == 1);
    CHECK_THROWS(encode_maxsat(d, 1, std::vector<std::uint64_t>{1}));
  }

  TEST_CASE("depth bounds") {
    const auto d = testing::table1();
    CHECK_THROWS(encode_bdd2(d, 0));
    CHECK_THROWS(encode_bdd2(d, max_depth + 1));
  }
}
