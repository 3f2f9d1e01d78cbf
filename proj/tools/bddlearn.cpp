// Command-line front end: binarize, encode, learn, mindepth, evaluate, cv,
// decode and a DIMACS solve command backed by the embedded solvers.
//
// Exit codes: 0 success, 1 usage, 2 data error, 3 solver failure or timeout.

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "bddlearn/bdd.hpp"
#include "bddlearn/data.hpp"
#include "bddlearn/encode.hpp"
#include "bddlearn/errors.hpp"
#include "bddlearn/maxsat.hpp"
#include "bddlearn/sat_solver.hpp"
#include "bddlearn/search.hpp"
#include "bddlearn/serialize.hpp"
#include "bddlearn/version.hpp"

namespace fs = std::filesystem;
using namespace bddlearn;
using io::json;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_usage = 1;
constexpr int exit_data = 2;
constexpr int exit_solver = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string data;
  std::string label;
};

struct LearnFlags {
  std::size_t depth = 2;
  std::string mode = "maxsat";
  std::string bias = "S";
  std::string preselect = "off";
  std::size_t cart_depth = 0;
  std::size_t min_leaf = 1;
  std::string solver;
  std::string workdir;
  double budget = 900.0;
  std::uint64_t seed = 0;
};

void add_learn_flags(CLI::App *cmd, LearnFlags &f) {
  cmd->add_option("--depth,-H", f.depth, "Diagram depth H")
      ->check(CLI::Range(std::size_t{1}, encode::max_depth));
  cmd->add_option("--mode", f.mode, "sat or maxsat")
      ->check(CLI::IsMember({"sat", "maxsat"}, CLI::ignore_case));
  cmd->add_option("--bias", f.bias, "Unknown-cell bias: P, C or S")
      ->check(CLI::IsMember({"P", "C", "S"}, CLI::ignore_case));
  cmd->add_option("--preselect", f.preselect, "off or cart")
      ->check(CLI::IsMember({"off", "cart"}));
  cmd->add_option("--cart-depth", f.cart_depth,
                  "Preselection tree depth (default 2*H)");
  cmd->add_option("--min-leaf", f.min_leaf, "Preselection minimum leaf size")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--solver", f.solver,
                  "embedded, or a command template containing {file} "
                  "(default: $BDD_SOLVER_CMD, else embedded)");
  cmd->add_option("--workdir", f.workdir, "Directory for external solver files");
  cmd->add_option("--budget", f.budget, "Solver budget in seconds")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", f.seed, "Solver seed");
}

search::LearnConfig make_config(const LearnFlags &f) {
  search::LearnConfig cfg;
  cfg.depth = f.depth;
  cfg.mode = io::parse_mode(f.mode);
  cfg.bias = post::parse_bias(f.bias);
  cfg.preselect.enabled = f.preselect == "cart";
  cfg.preselect.max_depth = f.cart_depth;
  cfg.preselect.min_leaf = f.min_leaf;
  cfg.budget_seconds = f.budget;
  cfg.seed = f.seed;
  std::string solver = f.solver;
  if (solver.empty())
    if (const char *env = std::getenv("BDD_SOLVER_CMD"))
      solver = env;
  if (!solver.empty() && solver != "embedded") {
    if (solver.find("{file}") == std::string::npos)
      throw UsageError("solver command must contain {file}");
    cfg.solver.external_command = solver;
  }
  if (!f.workdir.empty())
    cfg.solver.workdir = f.workdir;
  return cfg;
}

json config_json(const search::LearnConfig &cfg) {
  return {{"depth", cfg.depth},
          {"mode", io::to_string(cfg.mode)},
          {"bias", post::to_string(cfg.bias)},
          {"preselect",
           {{"enabled", cfg.preselect.enabled},
            {"max_depth", cfg.preselect.max_depth},
            {"min_leaf", cfg.preselect.min_leaf}}},
          {"solver", cfg.solver.external_command.empty()
                         ? std::string("embedded")
                         : cfg.solver.external_command},
          {"budget_seconds", cfg.budget_seconds},
          {"seed", cfg.seed}};
}

data::Dataset load(const Common &c) {
  return data::one_hot_binarize(data::load_csv(c.data, c.label));
}

std::string dump(const json &j) { return j.dump(2) + "\n"; }

void write_manifest(const fs::path &path, const std::string &command,
                    json config, const Common &c, const data::Dataset &d,
                    const std::vector<std::string> &outputs, double seconds) {
  const auto now = std::time(nullptr);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  json m{{"tool", "bddlearn"},
         {"version", version},
         {"command", command},
         {"config", std::move(config)},
         {"dataset",
          {{"path", c.data},
           {"label", c.label},
           {"fingerprint", io::fingerprint_file(c.data)},
           {"examples", d.size()},
           {"features", d.num_features()}}},
         {"outputs", outputs},
         {"timings", {{"total_seconds", seconds}}},
         {"timestamp", stamp}};
  io::write_atomic(path, dump(m));
}

double since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

void print_model_summary(const search::LearnedModel &m) {
  std::cout << "ordering";
  for (auto r : m.ordering)
    std::cout << ' ' << m.feature_names[r];
  std::cout << "\ntable " << m.table.cells() << "\nnodes " << m.bdd.node_count()
            << "\ntrain_accuracy " << m.train_accuracy << "\noptimal "
            << (m.optimal ? "yes" : "no") << '\n';
}

std::vector<std::uint64_t> parse_seeds(const std::string &s) {
  std::vector<std::uint64_t> out;
  std::stringstream in(s);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    const auto dots = tok.find("..");
    try {
      if (dots == std::string::npos) {
        out.push_back(std::stoull(tok));
      } else {
        const auto a = std::stoull(tok.substr(0, dots));
        const auto b = std::stoull(tok.substr(dots + 2));
        if (b < a)
          throw UsageError("empty seed range " + tok);
        for (auto x = a; x <= b; ++x)
          out.push_back(x);
      }
    } catch (const std::logic_error &) {
      throw UsageError("bad seed list '" + s + "'");
    }
  }
  if (out.empty())
    throw UsageError("no seeds given");
  return out;
}

search::LearnedModel model_from_solution(const fs::path &context_path,
                                         const fs::path &solution_path) {
  const auto ctx_doc = json::parse(io::read_file(context_path));
  const auto ctx = io::context_from_json(ctx_doc);
  const auto model = cnf::parse_model(io::read_file(solution_path));
  if (!model)
    throw LearnError(LearnError::Kind::depth_insufficient,
                     "solution reports UNSATISFIABLE");
  const auto decoded = encode::decode(*model, ctx);
  search::LearnedModel m;
  m.feature_names = ctx_doc.at("feature_names").get<std::vector<std::string>>();
  m.label_values = ctx_doc.value("label_values", std::vector<std::string>{});
  m.ordering = decoded.ordering;
  m.table = decoded.table;
  m.solver_table = decoded.table.cells();
  m.requested_depth = ctx.depth();
  m.mode = ctx.variant() == encode::Variant::maxsat ? search::Mode::maxsat
                                                    : search::Mode::sat;
  m.bdd = bdd::gen_bdd(m.table, m.ordering);
  return m;
}

int run_solve(const std::string &path, double budget, std::uint64_t seed) {
  std::ifstream in(path);
  if (!in)
    throw DataError("cannot open " + path);
  const auto f = cnf::parse_dimacs(in);
  const solve::SolveOptions opts{budget, seed, 0};
  auto print_model = [&](const cnf::Model &m) {
    std::cout << 'v';
    for (cnf::Var v = 1; v <= f.var_count(); ++v)
      std::cout << ' ' << (m.value(v) ? v : -v);
    std::cout << " 0\n";
  };
  if (f.soft().empty()) {
    const auto r = solve::sat_solve(f, opts);
    switch (r.status) {
    case solve::SatStatus::sat:
      std::cout << "s SATISFIABLE\n";
      print_model(*r.model);
      return 10;
    case solve::SatStatus::unsat:
      std::cout << "s UNSATISFIABLE\n";
      return 20;
    case solve::SatStatus::timeout:
      break;
    }
    std::cout << "s UNKNOWN\n";
    return 0;
  }
  const auto r = solve::maxsat_solve(f, opts);
  for (auto c : r.trajectory)
    std::cout << "o " << c << '\n';
  switch (r.status) {
  case solve::MaxSatStatus::optimum:
    std::cout << "s OPTIMUM FOUND\n";
    print_model(*r.model);
    return 30;
  case solve::MaxSatStatus::feasible:
    std::cout << "s SATISFIABLE\n";
    print_model(*r.model);
    return 10;
  case solve::MaxSatStatus::unsatisfiable:
    std::cout << "s UNSATISFIABLE\n";
    return 20;
  case solve::MaxSatStatus::timeout_no_solution:
    break;
  }
  std::cout << "s UNKNOWN\n";
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Learn optimal ordered reduced BDD classifiers with SAT/MaxSAT"};
  app.set_version_flag("--version", version);
  app.require_subcommand(1);

  // binarize
  Common bin;
  std::string bin_out;
  auto *cmd_bin = app.add_subcommand("binarize", "One-hot binarize a CSV file");
  cmd_bin->add_option("input", bin.data, "Input CSV")->required();
  cmd_bin->add_option("--label", bin.label, "Label column")->required();
  cmd_bin->add_option("--out,-o", bin_out, "Output CSV")->required();

  // encode
  Common enc;
  std::size_t enc_depth = 2;
  std::string enc_model = "bdd2";
  std::string enc_out;
  std::string enc_ctx;
  auto *cmd_enc = app.add_subcommand("encode", "Write a DIMACS encoding");
  cmd_enc->add_option("data", enc.data, "Input CSV")->required();
  cmd_enc->add_option("--label", enc.label, "Label column")->required();
  cmd_enc->add_option("--depth,-H", enc_depth, "Diagram depth H")
      ->required()
      ->check(CLI::Range(std::size_t{1}, encode::max_depth));
  cmd_enc->add_option("--model", enc_model, "bdd1, bdd2 or maxsat")
      ->check(CLI::IsMember({"bdd1", "bdd2", "maxsat"}));
  cmd_enc->add_option("--out,-o", enc_out, "Output .cnf or .wcnf")->required();
  cmd_enc->add_option("--context", enc_ctx,
                      "Context JSON (default <out>.context.json)");

  // learn
  Common lrn;
  LearnFlags lrn_flags;
  std::string lrn_out;
  std::string lrn_dot;
  std::string lrn_manifest;
  auto *cmd_learn = app.add_subcommand("learn", "Learn a BDD classifier");
  cmd_learn->add_option("data", lrn.data, "Training CSV")->required();
  cmd_learn->add_option("--label", lrn.label, "Label column")->required();
  add_learn_flags(cmd_learn, lrn_flags);
  cmd_learn->add_option("--out,-o", lrn_out, "Model JSON")->required();
  cmd_learn->add_option("--dot", lrn_dot, "Graphviz output");
  cmd_learn->add_option("--manifest", lrn_manifest,
                        "Run manifest (default <out>.manifest.json)");

  // mindepth
  Common md;
  LearnFlags md_flags;
  std::size_t md_h0 = 1;
  bool md_binary = false;
  std::string md_out;
  auto *cmd_md = app.add_subcommand("mindepth", "Smallest depth that classifies perfectly");
  cmd_md->add_option("data", md.data, "Training CSV")->required();
  cmd_md->add_option("--label", md.label, "Label column")->required();
  cmd_md->add_option("--h0", md_h0, "Starting depth")->check(CLI::PositiveNumber);
  cmd_md->add_flag("--binary", md_binary, "Bisect instead of stepping by one");
  cmd_md->add_option("--budget", md_flags.budget, "Total budget in seconds")
      ->check(CLI::PositiveNumber);
  cmd_md->add_option("--seed", md_flags.seed, "Solver seed");
  cmd_md->add_option("--solver", md_flags.solver, "embedded or a command template");
  cmd_md->add_option("--out,-o", md_out, "Model JSON");

  // evaluate
  Common ev;
  std::string ev_model;
  std::string ev_ctx;
  std::string ev_solution;
  auto *cmd_ev = app.add_subcommand("evaluate", "Accuracy of a model on a CSV");
  cmd_ev->add_option("data", ev.data, "Test CSV")->required();
  cmd_ev->add_option("--label", ev.label, "Label column")->required();
  auto *ev_model_opt = cmd_ev->add_option("--model", ev_model, "Model JSON");
  auto *ev_ctx_opt = cmd_ev->add_option("--context", ev_ctx, "Encoding context JSON");
  auto *ev_sol_opt =
      cmd_ev->add_option("--solution", ev_solution, "Solver output for the context");
  ev_ctx_opt->needs(ev_sol_opt)->excludes(ev_model_opt);
  ev_sol_opt->needs(ev_ctx_opt);

  // cv
  Common cv;
  LearnFlags cv_flags;
  std::size_t cv_k = 5;
  std::string cv_seeds = "1..5";
  std::size_t cv_threads = 0;
  std::string cv_out;
  std::string cv_csv;
  auto *cmd_cv = app.add_subcommand("cv", "k-fold cross-validation");
  cmd_cv->add_option("data", cv.data, "CSV")->required();
  cmd_cv->add_option("--label", cv.label, "Label column")->required();
  add_learn_flags(cmd_cv, cv_flags);
  cmd_cv->add_option("--k", cv_k, "Folds")->check(CLI::Range(2, 1000000));
  cmd_cv->add_option("--seeds", cv_seeds, "Seeds, e.g. 1,2,3 or 1..5");
  cmd_cv->add_option("--threads", cv_threads, "Workers (0 = all cores)");
  cmd_cv->add_option("--out,-o", cv_out, "Report JSON")->required();
  cmd_cv->add_option("--csv", cv_csv, "Per-run CSV");

  // decode
  std::string dec_ctx;
  std::string dec_solution;
  std::string dec_out;
  std::string dec_dot;
  auto *cmd_dec = app.add_subcommand("decode", "Turn solver output into a model");
  cmd_dec->add_option("--context", dec_ctx, "Encoding context JSON")->required();
  cmd_dec->add_option("--solution", dec_solution, "Solver output")->required();
  cmd_dec->add_option("--out,-o", dec_out, "Model JSON")->required();
  cmd_dec->add_option("--dot", dec_dot, "Graphviz output");

  // solve
  std::string slv_file;
  double slv_budget = 900.0;
  std::uint64_t slv_seed = 0;
  auto *cmd_slv = app.add_subcommand(
      "solve", "Solve a DIMACS CNF/WCNF file (exit 10 SAT, 20 UNSAT, 30 optimum)");
  cmd_slv->add_option("file", slv_file, "DIMACS file")->required();
  cmd_slv->add_option("--budget", slv_budget, "Seconds")->check(CLI::PositiveNumber);
  cmd_slv->add_option("--seed", slv_seed, "Solver seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_usage;
  }

  const auto t0 = std::chrono::steady_clock::now();
  try {
    if (*cmd_bin) {
      const auto d = load(bin);
      std::ostringstream s;
      data::write_csv(s, d, bin.label);
      io::write_atomic(bin_out, s.str());
      std::cout << "examples " << d.size() << "\nfeatures " << d.num_features()
                << '\n';
      return exit_ok;
    }

    if (*cmd_enc) {
      const auto d = load(enc);
      const auto variant = io::parse_variant(enc_model);
      const auto e = variant == encode::Variant::bdd1   ? encode::encode_bdd1(d, enc_depth)
                     : variant == encode::Variant::bdd2 ? encode::encode_bdd2(d, enc_depth)
                                                        : encode::encode_maxsat(d, enc_depth);
      std::ostringstream s;
      if (variant == encode::Variant::maxsat)
        cnf::emit_dimacs_wcnf(e.formula, s);
      else
        cnf::emit_dimacs_cnf(e.formula, s);
      io::write_atomic(enc_out, s.str());
      auto ctx = io::to_json(e.context);
      ctx["feature_names"] = d.feature_names();
      ctx["label_values"] = d.label_values();
      io::write_atomic(enc_ctx.empty() ? enc_out + ".context.json" : enc_ctx,
                       dump(ctx));
      std::cout << "variables " << e.formula.var_count() << "\nhard "
                << e.formula.hard().size() << "\nsoft " << e.formula.soft().size()
                << "\nliterals " << cnf::literal_count(e.formula) << '\n';
      return exit_ok;
    }

    if (*cmd_learn) {
      const auto cfg = make_config(lrn_flags);
      const auto d = load(lrn);
      const auto m = search::learn(d, cfg);
      io::write_atomic(lrn_out, dump(io::to_json(m)));
      std::vector<std::string> outputs{lrn_out};
      if (!lrn_dot.empty()) {
        std::ostringstream s;
        bdd::export_dot(m.bdd, s, m.feature_names);
        io::write_atomic(lrn_dot, s.str());
        outputs.push_back(lrn_dot);
      }
      print_model_summary(m);
      auto config = config_json(cfg);
      write_manifest(lrn_manifest.empty() ? lrn_out + ".manifest.json" : lrn_manifest,
                     "learn", std::move(config), lrn, d, outputs, since(t0));
      return exit_ok;
    }

    if (*cmd_md) {
      md_flags.mode = "sat";
      const auto cfg = make_config(md_flags);
      const auto d = load(md);
      const auto r = search::min_depth(d, md_h0, cfg, md_binary);
      std::cout << "min_depth " << r.depth << '\n';
      if (r.unsat_depth)
        std::cout << "unsat_at " << *r.unsat_depth << '\n';
      for (const auto &p : r.probes)
        std::cout << "probe " << p.depth << ' '
                  << (p.status == solve::SatStatus::sat ? "SAT" : "UNSAT") << '\n';
      print_model_summary(r.witness);
      if (!md_out.empty())
        io::write_atomic(md_out, dump(io::to_json(r.witness)));
      return exit_ok;
    }

    if (*cmd_ev) {
      if (ev_model.empty() && ev_ctx.empty())
        throw UsageError("evaluate needs --model or --context with --solution");
      const auto m = ev_model.empty()
                         ? model_from_solution(ev_ctx, ev_solution)
                         : io::model_from_json(json::parse(io::read_file(ev_model)));
      const auto raw = data::load_csv(ev.data, ev.label);
      const auto test = data::binarize_with_schema(raw, m.feature_names, m.label_values);
      const double acc = search::evaluate(m, test);
      std::cout << "accuracy " << acc << "\nexamples " << test.size() << '\n';
      return exit_ok;
    }

    if (*cmd_cv) {
      const auto cfg = make_config(cv_flags);
      const auto seeds = parse_seeds(cv_seeds);
      const auto d = load(cv);
      const auto report = search::cross_validate(d, cfg, cv_k, seeds, cv_threads);
      io::write_atomic(cv_out, dump(io::to_json(report)));
      if (!cv_csv.empty()) {
        std::ostringstream s;
        io::write_cv_csv(s, report);
        io::write_atomic(cv_csv, s.str());
      }
      const auto &a = report.aggregate;
      std::cout << "runs " << a.runs << "\nfailures " << a.failures
                << "\ntrain_accuracy " << a.train_accuracy << "\ntest_accuracy "
                << a.test_accuracy << "\nnodes " << a.nodes << "\nliterals "
                << a.literal_count << "\noptimal_rate " << a.optimal_rate << '\n';
      return a.failures == a.runs ? exit_solver : exit_ok;
    }

    if (*cmd_dec) {
      const auto m = model_from_solution(dec_ctx, dec_solution);
      io::write_atomic(dec_out, dump(io::to_json(m)));
      if (!dec_dot.empty()) {
        std::ostringstream s;
        bdd::export_dot(m.bdd, s, m.feature_names);
        io::write_atomic(dec_dot, s.str());
      }
      print_model_summary(m);
      return exit_ok;
    }

    if (*cmd_slv)
      return run_solve(slv_file, slv_budget, slv_seed);
  } catch (const UsageError &e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_usage;
  } catch (const std::invalid_argument &e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_usage;
  } catch (const LearnError &e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_solver;
  } catch (const SolverIntegrationError &e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_solver;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_data;
  }
  return exit_usage;
}
