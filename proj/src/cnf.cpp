#include "bddlearn/cnf.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>
#include <stdexcept>

namespace bddlearn::cnf {

Lit Lit::from_dimacs(std::int64_t x) {
  if (x == 0)
    throw std::invalid_argument("literal 0 is the clause terminator");
  return x > 0 ? pos(static_cast<Var>(x)) : neg(static_cast<Var>(-x));
}

void Model::set(Var v, bool b) {
  if (v < 1)
    throw std::invalid_argument("variable ids start at 1");
  if (static_cast<std::size_t>(v) >= values_.size())
    values_.resize(static_cast<std::size_t>(v) + 1, 0);
  values_[v] = b ? 1 : 0;
}

void Model::truncate(Var n) {
  values_.resize(static_cast<std::size_t>(n) + 1, 0);
}

void Formula::check_clause(const Clause &clause) const {
  for (const auto &l : clause)
    if (l.var() < 1 || l.var() > var_count_)
      throw std::out_of_range("literal variable " + std::to_string(l.var()) +
                              " outside 1.." + std::to_string(var_count_));
}

void Formula::add_hard(Clause clause) {
  if (clause.empty())
    throw std::invalid_argument("empty hard clause");
  check_clause(clause);
  hard_.push_back(std::move(clause));
}

void Formula::add_soft(Clause clause, std::uint64_t weight) {
  if (weight == 0)
    throw std::invalid_argument("soft clause weight must be >= 1");
  if (clause.empty())
    throw std::invalid_argument("empty soft clause");
  check_clause(clause);
  soft_.push_back({std::move(clause), weight});
}

std::uint64_t Formula::soft_weight_sum() const {
  std::uint64_t sum = 0;
  for (const auto &s : soft_)
    sum += s.weight;
  return sum;
}

void Formula::append(const Formula &other) {
  for (const auto &c : other.hard_)
    add_hard(c);
  for (const auto &s : other.soft_)
    add_soft(s.lits, s.weight);
}

void at_most_k(Formula &f, std::span<const Lit> lits, std::size_t k) {
  const std::size_t n = lits.size();
  if (k >= n)
    return;
  if (k == 0) {
    for (const auto &x : lits)
      f.add_hard({~x});
    return;
  }

  // reg[i][j]: at least j+1 of lits[0..i] are true
  std::vector<std::vector<Var>> reg(n - 1, std::vector<Var>(k));
  for (auto &row : reg)
    for (auto &v : row)
      v = f.fresh_var();

  f.add_hard({~lits[0], Lit::pos(reg[0][0])});
  for (std::size_t j = 1; j < k; ++j)
    f.add_hard({Lit::neg(reg[0][j])});

  for (std::size_t i = 1; i + 1 < n; ++i) {
    f.add_hard({~lits[i], Lit::pos(reg[i][0])});
    f.add_hard({Lit::neg(reg[i - 1][0]), Lit::pos(reg[i][0])});
    for (std::size_t j = 1; j < k; ++j) {
      f.add_hard({~lits[i], Lit::neg(reg[i - 1][j - 1]), Lit::pos(reg[i][j])});
      f.add_hard({Lit::neg(reg[i - 1][j]), Lit::pos(reg[i][j])});
    }
    f.add_hard({~lits[i], Lit::neg(reg[i - 1][k - 1])});
  }
  f.add_hard({~lits[n - 1], Lit::neg(reg[n - 2][k - 1])});
}

void exactly_one(Formula &f, std::span<const Lit> lits) {
  if (lits.empty())
    throw std::invalid_argument("exactly_one needs at least one literal");
  at_most_k(f, lits, 1);
  f.add_hard(Clause(lits.begin(), lits.end()));
}

bool satisfies(const Clause &clause, const Model &m) {
  return std::any_of(clause.begin(), clause.end(),
                     [&](Lit l) { return m.value(l); });
}

bool satisfies_hard(const Formula &f, const Model &m) {
  return std::all_of(f.hard().begin(), f.hard().end(),
                     [&](const Clause &c) { return satisfies(c, m); });
}

std::uint64_t soft_cost(const Formula &f, const Model &m) {
  std::uint64_t cost = 0;
  for (const auto &s : f.soft())
    if (!satisfies(s.lits, m))
      cost += s.weight;
  return cost;
}

std::uint64_t literal_count(const Formula &f) {
  std::uint64_t n = 0;
  for (const auto &c : f.hard())
    n += c.size();
  for (const auto &s : f.soft())
    n += s.lits.size();
  return n;
}

namespace {

void write_lits(std::ostream &out, const Clause &c) {
  for (const auto &l : c)
    out << l.dimacs() << ' ';
  out << "0\n";
}

} // namespace

void emit_dimacs_cnf(const Formula &f, std::ostream &out) {
  if (!f.soft().empty())
    throw std::invalid_argument("CNF output cannot carry soft clauses; use WCNF");
  out << "p cnf " << f.var_count() << ' ' << f.hard().size() << '\n';
  for (const auto &c : f.hard())
    write_lits(out, c);
}

void emit_dimacs_wcnf(const Formula &f, std::ostream &out) {
  const std::uint64_t top = 1 + f.soft_weight_sum();
  out << "p wcnf " << f.var_count() << ' ' << f.hard().size() + f.soft().size()
      << ' ' << top << '\n';
  for (const auto &c : f.hard()) {
    out << top << ' ';
    write_lits(out, c);
  }
  for (const auto &s : f.soft()) {
    out << s.weight << ' ';
    write_lits(out, s.lits);
  }
}

namespace {

std::vector<std::string_view> tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r'))
      ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r')
      ++j;
    if (j > i)
      out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::int64_t to_int(std::string_view tok) {
  std::int64_t x = 0;
  const auto *end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, x);
  if (ec != std::errc() || ptr != end)
    throw std::runtime_error("not an integer: '" + std::string(tok) + "'");
  return x;
}

bool is_bitstring(std::string_view tok) {
  return !tok.empty() && tok.find_first_not_of("01") == std::string_view::npos;
}

} // namespace

ParsedOutput parse_solver_output(std::string_view text) {
  ParsedOutput out;
  std::vector<std::vector<std::string_view>> vlines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos)
      nl = text.size();
    const auto line = text.substr(pos, nl - pos);
    pos = nl + 1;
    auto toks = tokens(line);
    if (toks.empty())
      continue;
    if (toks[0] == "s") {
      std::string status;
      for (std::size_t i = 1; i < toks.size(); ++i)
        status += (i > 1 ? " " : "") + std::string(toks[i]);
      out.has_status_line = true;
      if (status == "SATISFIABLE")
        out.status = ModelStatus::satisfiable;
      else if (status == "UNSATISFIABLE")
        out.status = ModelStatus::unsatisfiable;
      else if (status == "OPTIMUM FOUND")
        out.status = ModelStatus::optimum;
      else
        out.status = ModelStatus::unknown;
    } else if (toks[0] == "o" && toks.size() >= 2) {
      out.reported_cost = static_cast<std::uint64_t>(to_int(toks[1]));
    } else if (toks[0] == "v") {
      vlines.emplace_back(toks.begin() + 1, toks.end());
    }
  }

  if (vlines.empty())
    return out;

  // A single 0/1 token per v-line is the bit-string dialect.
  const bool bitstring = std::all_of(vlines.begin(), vlines.end(), [](auto &v) {
    return v.size() == 1 && is_bitstring(v[0]);
  });
  Model m;
  if (bitstring) {
    Var next = 1;
    for (const auto &v : vlines)
      for (char ch : v[0])
        m.set(next++, ch == '1');
  } else {
    for (const auto &v : vlines) {
      for (const auto tok : v) {
        std::int64_t x = 0;
        try {
          x = to_int(tok);
        } catch (const std::runtime_error &) {
          throw std::runtime_error("unparsable v-line token '" +
                                   std::string(tok) + "'");
        }
        if (x == 0)
          continue;
        const Lit l = Lit::from_dimacs(x);
        m.set(l.var(), !l.negated());
      }
    }
  }
  out.model = std::move(m);
  return out;
}

std::optional<Model> parse_model(std::string_view text) {
  auto parsed = parse_solver_output(text);
  if (!parsed.has_status_line)
    throw std::runtime_error("solver output has no status line");
  if (parsed.status == ModelStatus::unsatisfiable)
    return std::nullopt;
  if (parsed.status == ModelStatus::unknown)
    throw std::runtime_error("solver reported an unknown status");
  if (!parsed.model)
    throw std::runtime_error("solver output has no v-line");
  return std::move(parsed.model);
}

Formula parse_dimacs(std::istream &in) {
  std::string line;
  bool weighted = false;
  bool have_header = false;
  std::uint64_t top = 0;
  Formula f;
  std::vector<std::int64_t> pending;
  std::uint64_t pending_weight = 0; // 0: not read yet
  bool pending_hard = false;

  auto flush = [&] {
    Clause c;
    for (auto x : pending)
      c.push_back(Lit::from_dimacs(x));
    if (!weighted || pending_hard || (top && pending_weight >= top))
      f.add_hard(std::move(c));
    else
      f.add_soft(std::move(c), pending_weight == 0 ? 1 : pending_weight);
    pending.clear();
    pending_weight = 0;
    pending_hard = false;
  };

  while (std::getline(in, line)) {
    auto toks = tokens(line);
    if (toks.empty() || toks[0] == "c" || toks[0][0] == 'c')
      continue;
    if (toks[0] == "p") {
      if (toks.size() < 4)
        throw std::runtime_error("malformed problem line");
      weighted = toks[1] == "wcnf";
      if (!weighted && toks[1] != "cnf")
        throw std::runtime_error("unknown problem type '" + std::string(toks[1]) + "'");
      f = Formula(static_cast<Var>(to_int(toks[2])));
      if (weighted && toks.size() >= 5)
        top = static_cast<std::uint64_t>(to_int(toks[4]));
      have_header = true;
      continue;
    }
    // No problem line: the headerless WCNF dialect with "h" for hard clauses.
    if (!have_header && !weighted)
      weighted = true;
    for (std::size_t i = 0; i < toks.size(); ++i) {
      if (weighted && pending.empty() && pending_weight == 0 && !pending_hard) {
        if (toks[i] == "h")
          pending_hard = true;
        else
          pending_weight = static_cast<std::uint64_t>(to_int(toks[i]));
        if (!pending_hard && pending_weight == 0)
          throw std::runtime_error("clause weight must be at least 1");
        continue;
      }
      const auto x = to_int(toks[i]);
      if (x == 0) {
        flush();
      } else {
        const auto v = static_cast<Var>(x > 0 ? x : -x);
        while (f.var_count() < v)
          f.fresh_var();
        pending.push_back(x);
      }
    }
  }
  if (!have_header && f.hard().empty() && f.soft().empty() && pending.empty())
    throw std::runtime_error("missing DIMACS problem line");
  if (!pending.empty())
    flush();
  return f;
}

} // namespace bddlearn::cnf
