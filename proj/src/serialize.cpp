#include "bddlearn/serialize.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

namespace bddlearn::io {

namespace {

json stats_json(const solve::SolverStats &s) {
  return {{"conflicts", s.conflicts},       {"decisions", s.decisions},
          {"propagations", s.propagations}, {"restarts", s.restarts},
          {"learned", s.learned},           {"deleted", s.deleted}};
}

solve::SolverStats stats_from(const json &j) {
  solve::SolverStats s;
  s.conflicts = j.value("conflicts", std::uint64_t{0});
  s.decisions = j.value("decisions", std::uint64_t{0});
  s.propagations = j.value("propagations", std::uint64_t{0});
  s.restarts = j.value("restarts", std::uint64_t{0});
  s.learned = j.value("learned", std::uint64_t{0});
  s.deleted = j.value("deleted", std::uint64_t{0});
  return s;
}

std::string direction_name(bdd::Direction d) {
  return d == bdd::Direction::left ? "left" : "right";
}

// Fixed notation so repeated runs produce identical text.
std::string fixed(double v, int digits) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

} // namespace

json to_json(const bdd::Bdd &b) {
  json nodes = json::array();
  for (const auto &n : b.nodes()) {
    json jn{{"id", n.id}};
    if (n.is_sink())
      jn["sink"] = n.sink_value();
    else
      jn["position"] = n.position;
    nodes.push_back(std::move(jn));
  }
  json edges = json::array();
  for (const auto &e : b.edges())
    edges.push_back({{"parent", e.parent},
                     {"child", e.child},
                     {"direction", direction_name(e.direction)}});
  return {{"root", b.root()},
          {"ordering", b.ordering().features()},
          {"node_count", b.node_count()},
          {"nodes", std::move(nodes)},
          {"edges", std::move(edges)}};
}

json to_json(const encode::EncodingContext &ctx) {
  const auto kh = ctx.num_features() * ctx.depth();
  json vars{{"feature_at", {{"first", 1}, {"last", kh}, {"index", "r*H + i + 1"}}},
            {"cell",
             {{"first", kh + 1}, {"last", kh + ctx.num_cells()}, {"index", "K*H + j + 1"}}}};
  if (ctx.has_feature_values())
    vars["feature_value"] = {
        {"first", kh + ctx.num_cells() + 1},
        {"last", kh + ctx.num_cells() + ctx.depth() * ctx.num_examples()},
        {"index", "K*H + 2^H + i*M + q + 1"}};
  return {{"format", context_format},
          {"variant", to_string(ctx.variant())},
          {"depth", ctx.depth()},
          {"num_features", ctx.num_features()},
          {"num_examples", ctx.num_examples()},
          {"semantic_vars", ctx.semantic_vars()},
          {"variables", std::move(vars)}};
}

encode::EncodingContext context_from_json(const json &j) {
  if (j.value("format", std::string{}) != context_format)
    throw std::runtime_error("not an encoding context document");
  return encode::EncodingContext(parse_variant(j.at("variant").get<std::string>()),
                                 j.at("depth").get<std::size_t>(),
                                 j.at("num_features").get<std::size_t>(),
                                 j.at("num_examples").get<std::size_t>());
}

json to_json(const search::LearnedModel &m) {
  json names = json::array();
  for (auto r : m.ordering)
    names.push_back(r < m.feature_names.size() ? m.feature_names[r]
                                               : "f" + std::to_string(r + 1));
  return {
      {"format", model_format},
      {"ordering", std::move(names)},
      {"ordering_indices", m.ordering.features()},
      {"table", m.table.cells()},
      {"solver_table", m.solver_table},
      {"bias", post::to_string(m.bias)},
      {"H", m.table.order()},
      {"requested_depth", m.requested_depth},
      {"mode", to_string(m.mode)},
      {"metrics",
       {{"train_accuracy", m.train_accuracy},
        {"train_errors", m.train_errors},
        {"optimal", m.optimal},
        {"node_count", m.bdd.node_count()},
        {"literal_count", m.literal_count},
        {"solver", stats_json(m.stats)}}},
      {"candidate_features", m.candidate_features},
      {"feature_names", m.feature_names},
      {"label_values", m.label_values},
      {"bdd", to_json(m.bdd)},
  };
}

search::LearnedModel model_from_json(const json &j) {
  if (j.value("format", std::string{}) != model_format)
    throw std::runtime_error("not a bddlearn model document");
  search::LearnedModel m;
  m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
  m.label_values = j.value("label_values", std::vector<std::string>{});
  std::vector<std::size_t> ordering;
  if (j.contains("ordering_indices")) {
    ordering = j.at("ordering_indices").get<std::vector<std::size_t>>();
  } else {
    for (const auto &name : j.at("ordering")) {
      const auto it = std::find(m.feature_names.begin(), m.feature_names.end(),
                                name.get<std::string>());
      if (it == m.feature_names.end())
        throw std::runtime_error("model ordering names unknown feature " +
                                 name.get<std::string>());
      ordering.push_back(static_cast<std::size_t>(it - m.feature_names.begin()));
    }
  }
  for (auto r : ordering)
    if (r >= m.feature_names.size())
      throw std::runtime_error("model ordering index out of range");
  m.ordering = bdd::FeatureOrdering(std::move(ordering));
  m.table = bdd::TruthTable(j.at("table").get<std::string>());
  if (m.table.order() != m.ordering.size())
    throw std::runtime_error("model table order differs from ordering length");
  m.solver_table = j.value("solver_table", m.table.cells());
  m.bias = post::parse_bias(j.value("bias", std::string{"S"}));
  m.mode = parse_mode(j.value("mode", std::string{"maxsat"}));
  m.requested_depth = j.value("requested_depth", m.table.order());
  if (j.contains("metrics")) {
    const auto &mt = j.at("metrics");
    m.train_accuracy = mt.value("train_accuracy", 0.0);
    m.train_errors = mt.value("train_errors", std::size_t{0});
    m.optimal = mt.value("optimal", false);
    m.literal_count = mt.value("literal_count", std::uint64_t{0});
    if (mt.contains("solver"))
      m.stats = stats_from(mt.at("solver"));
  }
  m.candidate_features =
      j.value("candidate_features", std::vector<std::size_t>{});
  m.bdd = bdd::gen_bdd(m.table, m.ordering);
  return m;
}

json to_json(const search::CvReport &r) {
  json runs = json::array();
  for (const auto &run : r.runs) {
    json jr{{"seed", run.seed},
            {"fold", run.fold},
            {"solver_seed", run.solver_seed},
            {"ok", run.ok}};
    if (run.ok) {
      jr["train_accuracy"] = run.train_accuracy;
      jr["test_accuracy"] = run.test_accuracy;
      jr["nodes"] = run.nodes;
      jr["literal_count"] = run.literal_count;
      jr["seconds"] = run.seconds;
      jr["optimal"] = run.optimal;
    } else {
      jr["error"] = run.error;
    }
    runs.push_back(std::move(jr));
  }
  const auto &a = r.aggregate;
  return {{"k", r.k},
          {"seeds", r.seeds},
          {"aggregate",
           {{"runs", a.runs},
            {"failures", a.failures},
            {"train_accuracy", a.train_accuracy},
            {"test_accuracy", a.test_accuracy},
            {"nodes", a.nodes},
            {"literal_count", a.literal_count},
            {"seconds", a.seconds},
            {"optimal_rate", a.optimal_rate}}},
          {"runs", std::move(runs)}};
}

void write_cv_csv(std::ostream &out, const search::CvReport &r) {
  out << "Seed,Fold,Train,Test,Size,E_Size,Time,Opt,Error\n";
  for (const auto &run : r.runs) {
    out << run.seed << ',' << run.fold << ',';
    if (run.ok)
      out << fixed(run.train_accuracy, 4) << ',' << fixed(run.test_accuracy, 4)
          << ',' << run.nodes << ',' << run.literal_count << ','
          << fixed(run.seconds, 3) << ',' << (run.optimal ? 1 : 0) << ",\n";
    else
      out << ",,,,,,\"" << run.error << "\"\n";
  }
}

std::string_view to_string(encode::Variant v) noexcept {
  switch (v) {
  case encode::Variant::bdd1:
    return "bdd1";
  case encode::Variant::bdd2:
    return "bdd2";
  case encode::Variant::maxsat:
    return "maxsat";
  }
  return "bdd2";
}

encode::Variant parse_variant(std::string_view s) {
  if (s == "bdd1")
    return encode::Variant::bdd1;
  if (s == "bdd2")
    return encode::Variant::bdd2;
  if (s == "maxsat")
    return encode::Variant::maxsat;
  throw std::invalid_argument("unknown encoding '" + std::string(s) + "'");
}

std::string_view to_string(search::Mode m) noexcept {
  return m == search::Mode::sat ? "sat" : "maxsat";
}

search::Mode parse_mode(std::string_view s) {
  if (s == "sat" || s == "SAT")
    return search::Mode::sat;
  if (s == "maxsat" || s == "MAXSAT")
    return search::Mode::maxsat;
  throw std::invalid_argument("unknown mode '" + std::string(s) + "'");
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string fingerprint_file(const std::filesystem::path &path) {
  std::ostringstream s;
  s << "fnv1a64:" << std::hex << std::setw(16) << std::setfill('0')
    << fnv1a64(read_file(path));
  return s.str();
}

void write_atomic(const std::filesystem::path &path, std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw std::runtime_error("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out)
      throw std::runtime_error("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("cannot move output into place at " + path.string() +
                             ": " + ec.message());
  }
}

std::string read_file(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("cannot open " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

} // namespace bddlearn::io
