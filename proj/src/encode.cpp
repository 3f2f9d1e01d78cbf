#include "bddlearn/encode.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "bddlearn/errors.hpp"

namespace bddlearn::encode {

using cnf::Clause;
using cnf::Formula;
using cnf::Lit;
using cnf::Var;

EncodingContext::EncodingContext(Variant variant, std::size_t depth,
                                 std::size_t features, std::size_t examples)
    : variant_(variant), depth_(depth), features_(features),
      examples_(examples) {
  if (depth < 1 || depth > max_depth)
    throw std::invalid_argument("depth must lie in 1.." +
                                std::to_string(max_depth));
}

Var EncodingContext::semantic_vars() const noexcept {
  std::size_t n = features_ * depth_ + num_cells();
  if (has_feature_values())
    n += depth_ * examples_;
  return static_cast<Var>(n);
}

Var EncodingContext::feature_at(std::size_t feature, std::size_t position) const {
  if (feature >= features_ || position >= depth_)
    throw std::out_of_range("feature_at index out of range");
  return static_cast<Var>(feature * depth_ + position + 1);
}

Var EncodingContext::cell(std::size_t j) const {
  if (j >= num_cells())
    throw std::out_of_range("cell index out of range");
  return static_cast<Var>(features_ * depth_ + j + 1);
}

Var EncodingContext::feature_value(std::size_t position,
                                   std::size_t example) const {
  if (!has_feature_values())
    throw std::logic_error("BDD1 has no feature-value variables");
  if (position >= depth_ || example >= examples_)
    throw std::out_of_range("feature_value index out of range");
  return static_cast<Var>(features_ * depth_ + num_cells() +
                          position * examples_ + example + 1);
}

namespace {

void require_consistent(const data::Dataset &d) {
  auto conflicts = data::check_consistency(d);
  if (conflicts.empty())
    return;
  std::string msg = "dataset is inconsistent: examples";
  for (auto q : conflicts.front())
    msg += " " + std::to_string(q + 1);
  msg += " share features but not labels";
  if (conflicts.size() > 1)
    msg += " (" + std::to_string(conflicts.size() - 1) + " more groups)";
  throw InconsistentDataError(msg, std::move(conflicts));
}

// Each feature used at most once, exactly one feature per position, and the
// table's two halves differ somewhere.
void add_structure(Formula &f, const EncodingContext &ctx) {
  const auto H = ctx.depth();
  const auto K = ctx.num_features();
  for (std::size_t r = 0; r < K; ++r) {
    std::vector<Lit> lits;
    for (std::size_t i = 0; i < H; ++i)
      lits.push_back(Lit::pos(ctx.feature_at(r, i)));
    cnf::at_most_k(f, lits, 1);
  }
  for (std::size_t i = 0; i < H; ++i) {
    std::vector<Lit> lits;
    for (std::size_t r = 0; r < K; ++r)
      lits.push_back(Lit::pos(ctx.feature_at(r, i)));
    if (lits.empty()) {
      // No features at all: no ordering exists. Encode as x and not x.
      const Var x = f.fresh_var();
      f.add_hard({Lit::pos(x)});
      f.add_hard({Lit::neg(x)});
      continue;
    }
    cnf::exactly_one(f, lits);
  }

  const std::size_t half = ctx.num_cells() / 2;
  Clause cover;
  for (std::size_t j = 0; j < half; ++j) {
    const Var x = ctx.cell(j);
    const Var y = ctx.cell(j + half);
    const Var e = f.fresh_var(); // e <-> x xor y
    f.add_hard({Lit::neg(e), Lit::pos(x), Lit::pos(y)});
    f.add_hard({Lit::neg(e), Lit::neg(x), Lit::neg(y)});
    f.add_hard({Lit::pos(e), Lit::neg(x), Lit::pos(y)});
    f.add_hard({Lit::pos(e), Lit::pos(x), Lit::neg(y)});
    cover.push_back(Lit::pos(e));
  }
  f.add_hard(std::move(cover));
}

void add_feature_values(Formula &f, const EncodingContext &ctx,
                        const data::Dataset &d) {
  for (std::size_t q = 0; q < d.size(); ++q)
    for (std::size_t i = 0; i < ctx.depth(); ++i) {
      const Var dv = ctx.feature_value(i, q);
      for (std::size_t r = 0; r < d.num_features(); ++r)
        f.add_hard({Lit::neg(ctx.feature_at(r, i)),
                    Lit(dv, d.feature(q, r) == 0)});
    }
}

// Clause j of example q: (the example does not reach cell j) or (cell j
// carries the example's label).
Clause path_clause(const EncodingContext &ctx, std::size_t q, std::size_t j,
                   std::uint8_t label) {
  Clause c;
  c.reserve(ctx.depth() + 1);
  for (std::size_t i = 0; i < ctx.depth(); ++i)
    c.push_back(Lit(ctx.feature_value(i, q), bdd::cell_bit(i, j, ctx.depth()) == 1));
  c.push_back(Lit(ctx.cell(j), label == 0));
  return c;
}

void check_depth(std::size_t depth) {
  if (depth < 1 || depth > max_depth)
    throw std::invalid_argument("depth must lie in 1.." +
                                std::to_string(max_depth));
}

} // namespace

Encoding encode_bdd1(const data::Dataset &d, std::size_t depth) {
  check_depth(depth);
  require_consistent(d);
  EncodingContext ctx(Variant::bdd1, depth, d.num_features(), d.size());
  Formula f(ctx.semantic_vars());
  add_structure(f, ctx);

  for (std::size_t q = 0; q < d.size(); ++q) {
    const auto label = d.label(q);
    for (std::size_t j = 0; j < ctx.num_cells(); ++j) {
      Clause c;
      c.push_back(Lit(ctx.cell(j), label == 0));
      for (std::size_t i = 0; i < depth; ++i) {
        const int bit = bdd::cell_bit(i, j, depth);
        for (std::size_t r = 0; r < d.num_features(); ++r)
          if (bit != d.feature(q, r))
            c.push_back(Lit::pos(ctx.feature_at(r, i)));
      }
      f.add_hard(std::move(c));
    }
  }
  return {std::move(f), ctx};
}

Encoding encode_bdd2(const data::Dataset &d, std::size_t depth) {
  check_depth(depth);
  require_consistent(d);
  EncodingContext ctx(Variant::bdd2, depth, d.num_features(), d.size());
  Formula f(ctx.semantic_vars());
  add_structure(f, ctx);
  add_feature_values(f, ctx, d);
  for (std::size_t q = 0; q < d.size(); ++q)
    for (std::size_t j = 0; j < ctx.num_cells(); ++j)
      f.add_hard(path_clause(ctx, q, j, d.label(q)));
  return {std::move(f), ctx};
}

Encoding encode_maxsat(const data::Dataset &d, std::size_t depth,
                       std::span<const std::uint64_t> weights) {
  check_depth(depth);
  if (!weights.empty() && weights.size() != d.size())
    throw std::invalid_argument("need one weight per example");
  EncodingContext ctx(Variant::maxsat, depth, d.num_features(), d.size());
  Formula f(ctx.semantic_vars());
  add_structure(f, ctx);
  add_feature_values(f, ctx, d);
  for (std::size_t q = 0; q < d.size(); ++q) {
    const std::uint64_t w = weights.empty() ? 1 : weights[q];
    for (std::size_t j = 0; j < ctx.num_cells(); ++j)
      f.add_soft(path_clause(ctx, q, j, d.label(q)), w);
  }
  return {std::move(f), ctx};
}

Decoded decode(const cnf::Model &model, const EncodingContext &ctx) {
  std::vector<std::size_t> features;
  for (std::size_t i = 0; i < ctx.depth(); ++i) {
    std::optional<std::size_t> chosen;
    for (std::size_t r = 0; r < ctx.num_features(); ++r) {
      if (!model.value(ctx.feature_at(r, i)))
        continue;
      if (chosen)
        throw std::runtime_error("corrupt model: several features at position " +
                                 std::to_string(i + 1));
      chosen = r;
    }
    if (!chosen)
      throw std::runtime_error("corrupt model: no feature at position " +
                               std::to_string(i + 1));
    if (std::find(features.begin(), features.end(), *chosen) != features.end())
      throw std::runtime_error("corrupt model: feature " +
                               std::to_string(*chosen + 1) + " used twice");
    features.push_back(*chosen);
  }
  std::string cells(ctx.num_cells(), '0');
  for (std::size_t j = 0; j < ctx.num_cells(); ++j)
    cells[j] = model.value(ctx.cell(j)) ? '1' : '0';
  return {bdd::FeatureOrdering(std::move(features)),
          bdd::TruthTable(std::move(cells))};
}

} // namespace bddlearn::encode
