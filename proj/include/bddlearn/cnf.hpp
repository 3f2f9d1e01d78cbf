#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bddlearn::cnf {

using Var = std::int32_t;

/// A literal: a positive variable id and a sign.
class Lit {
public:
  constexpr Lit() = default;
  constexpr Lit(Var var, bool negated) : var_(var), negated_(negated) {}

  static constexpr Lit pos(Var v) { return {v, false}; }
  static constexpr Lit neg(Var v) { return {v, true}; }
  /// From a signed DIMACS integer.
  static Lit from_dimacs(std::int64_t x);

  [[nodiscard]] constexpr Var var() const noexcept { return var_; }
  [[nodiscard]] constexpr bool negated() const noexcept { return negated_; }
  [[nodiscard]] constexpr std::int64_t dimacs() const noexcept {
    return negated_ ? -static_cast<std::int64_t>(var_) : var_;
  }
  constexpr Lit operator~() const noexcept { return {var_, !negated_}; }

  friend constexpr bool operator==(Lit, Lit) = default;
  friend constexpr auto operator<=>(Lit, Lit) = default;

private:
  Var var_ = 0;
  bool negated_ = false;
};

using Clause = std::vector<Lit>;

struct SoftClause {
  Clause lits;
  std::uint64_t weight = 1;
};

/// Truth values indexed by variable id; index 0 is unused.
class Model {
public:
  Model() = default;
  explicit Model(Var var_count) : values_(static_cast<std::size_t>(var_count) + 1, 0) {}

  [[nodiscard]] Var var_count() const noexcept {
    return values_.empty() ? 0 : static_cast<Var>(values_.size() - 1);
  }
  [[nodiscard]] bool value(Var v) const {
    return static_cast<std::size_t>(v) < values_.size() && values_[v] != 0;
  }
  [[nodiscard]] bool value(Lit l) const { return value(l.var()) != l.negated(); }
  void set(Var v, bool b);
  /// Keep only variables 1..n.
  void truncate(Var n);

  friend bool operator==(const Model &, const Model &) = default;

private:
  std::vector<std::uint8_t> values_;
};

/// CNF with hard clauses and weighted soft clauses.
class Formula {
public:
  Formula() = default;
  explicit Formula(Var var_count) : var_count_(var_count) {}

  [[nodiscard]] Var var_count() const noexcept { return var_count_; }
  Var fresh_var() noexcept { return ++var_count_; }

  /// Appends a hard clause. Empty clauses and out-of-range variables throw.
  void add_hard(Clause clause);
  void add_soft(Clause clause, std::uint64_t weight = 1);

  [[nodiscard]] const std::vector<Clause> &hard() const noexcept { return hard_; }
  [[nodiscard]] const std::vector<SoftClause> &soft() const noexcept {
    return soft_;
  }
  [[nodiscard]] std::uint64_t soft_weight_sum() const;

  /// Appends all clauses of `other`, whose variables must already be in range.
  void append(const Formula &other);

private:
  void check_clause(const Clause &clause) const;

  Var var_count_ = 0;
  std::vector<Clause> hard_;
  std::vector<SoftClause> soft_;
};

/// Sequential counter (Sinz) encoding of sum(lits) <= k. Adds (n-1)*k
/// register variables; nothing when k >= n; unit negations when k == 0.
void at_most_k(Formula &f, std::span<const Lit> lits, std::size_t k);
/// Sequential counter at-most-one plus the covering clause.
void exactly_one(Formula &f, std::span<const Lit> lits);

[[nodiscard]] bool satisfies(const Clause &clause, const Model &m);
/// True iff every hard clause holds under `m`.
[[nodiscard]] bool satisfies_hard(const Formula &f, const Model &m);
/// Total weight of soft clauses falsified by `m`.
[[nodiscard]] std::uint64_t soft_cost(const Formula &f, const Model &m);

/// Sum of clause lengths over hard and soft clauses.
[[nodiscard]] std::uint64_t literal_count(const Formula &f);

void emit_dimacs_cnf(const Formula &f, std::ostream &out);
/// Classic top-weight WCNF: top = 1 + sum of soft weights.
void emit_dimacs_wcnf(const Formula &f, std::ostream &out);

enum class ModelStatus { satisfiable, unsatisfiable, optimum, unknown };

struct ParsedOutput {
  ModelStatus status = ModelStatus::unknown;
  bool has_status_line = false;
  std::optional<Model> model;
  /// Last "o" line, when present.
  std::optional<std::uint64_t> reported_cost;
};

/// Parses competition-style solver output ("s", "v", "o" lines). Both the
/// signed-integer and the 0/1 bit-string v-line dialects are accepted.
/// Throws std::runtime_error on an unparsable v-line.
ParsedOutput parse_solver_output(std::string_view text);

/// The model of a satisfiable/optimal output, or nullopt when the output
/// reports UNSATISFIABLE. Throws when the status is missing or no v-line is
/// present for a satisfiable status.
std::optional<Model> parse_model(std::string_view text);

/// Reads DIMACS CNF or WCNF. Files without a problem line are read as the
/// headerless WCNF dialect, where "h" marks hard clauses.
Formula parse_dimacs(std::istream &in);

} // namespace bddlearn::cnf
