#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "wscond/benchmark.hpp"
#include "wscond/conditioning.hpp"
#include "wscond/engine.hpp"
#include "wscond/errors.hpp"
#include "wscond/generators.hpp"
#include "wscond/io.hpp"
#include "wscond/karp_luby.hpp"

namespace fs = std::filesystem;
using namespace wscond;

namespace {

enum Exit { kOk = 0, kValidation = 2, kResource = 3, kUnsatisfiable = 4 };

struct EngineFlags {
  std::string algorithm = "indve";
  std::string heuristic = "minlog";
  double epsilon = 0.1;
  double delta = 0.1;
  std::uint64_t seed = 0;
  bool kl_fixed = false;
  unsigned threads = 1;
  double timeout_s = 0.0;

  void add_to(CLI::App& app, bool with_algorithm) {
    if (with_algorithm) {
      app.add_option("--algorithm", algorithm, "indve | ve | we | kl | brute")
          ->check(CLI::IsMember({"indve", "ve", "we", "kl", "brute"}));
      app.add_option("--epsilon", epsilon, "Karp-Luby relative error");
      app.add_option("--delta", delta, "Karp-Luby failure probability");
      app.add_option("--seed", seed, "Karp-Luby seed");
      app.add_flag("--kl-fixed", kl_fixed, "Karp-Luby with the fixed 4m ln(2/δ)/ε² trial count");
    }
    app.add_option("--heuristic", heuristic, "minlog | minmax")
        ->check(CLI::IsMember({"minlog", "minmax"}));
    app.add_option("--threads", threads, "worker threads for independent components");
    app.add_option("--timeout", timeout_s, "wall-clock limit in seconds (0: none)");
  }

  EngineOptions options() const {
    EngineOptions o;
    o.algorithm = parse_algorithm(algorithm);
    o.heuristic = parse_heuristic(heuristic);
    o.epsilon = epsilon;
    o.delta = delta;
    o.seed = seed;
    o.kl_fixed = kl_fixed;
    o.threads = std::max(1u, threads);
    if (timeout_s > 0.0) {
      o.deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                      std::chrono::duration<double>(timeout_s));
    }
    o.apply_env_cap();
    return o;
  }
};

std::string tuple_text(const Tuple& t) {
  std::string out;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) out += ',';
    out += to_string(t[i]);
  }
  return out;
}

// The evidence/Boolean ws-set named on the command line.
WsSet select_wsset(const ProbabilisticDatabase& db, const std::string& relation,
                   const std::string& query_file) {
  if (!query_file.empty()) return evidence_wsset(db, parse_boolean_query(read_file(query_file)));
  if (!relation.empty()) return normalize(descriptors_of(db.relation(relation)), db.world);
  if (db.relations.size() == 1) return normalize(descriptors_of(db.relations.begin()->second), db.world);
  throw ValidationError("database has several relations; pass --relation or --query");
}

int cmd_confidence(const std::string& input, const std::string& world_file,
                   const std::string& relation, const std::string& query_file, bool per_tuple,
                   bool dump_tree, const EngineFlags& flags) {
  const auto opts = flags.options();
  auto report = [&](const std::string& prefix, const WsSet& s, const WorldTable& w) {
    const auto start = Clock::now();
    const auto r = compute_confidence(s, w, opts);
    const double ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    std::cout << prefix << format_fixed(r.value, 12) << "\n";
    std::cerr << "algorithm=" << to_string(opts.algorithm);
    if (uses_heuristic(opts.algorithm)) std::cerr << " heuristic=" << to_string(opts.heuristic);
    if (opts.algorithm == Algorithm::KL) std::cerr << " rng=" << kRngName << " seed=" << opts.seed;
    std::cerr << " descriptors=" << s.size() << " work=" << r.work
              << " time_ms=" << format_fixed(ms, 3) << "\n";
  };

  if (fs::is_directory(input)) {
    const auto db = read_database(input);
    db.validate();
    if (per_tuple) {
      if (relation.empty()) throw ValidationError("--per-tuple needs --relation");
      std::map<Tuple, std::vector<WsDescriptor>> groups;
      for (const auto& row : db.relation(relation).rows()) groups[row.values].push_back(row.wsd);
      for (auto& [tuple, ds] : groups) {
        report(tuple_text(tuple) + ",", normalize(WsSet(std::move(ds)), db.world), db.world);
      }
      return kOk;
    }
    const WsSet s = select_wsset(db, relation, query_file);
    if (dump_tree) std::cerr << dump(compute_tree(s, db.world), db.world);
    report("", s, db.world);
    return kOk;
  }

  fs::path wpath = world_file;
  if (wpath.empty()) wpath = fs::path(input).parent_path() / "world.csv";
  const auto w = parse_world_table(read_file(wpath));
  const auto s = normalize(parse_wsset(read_file(input), w), w);
  if (dump_tree) std::cerr << dump(compute_tree(s, w), w);
  report("", s, w);
  return kOk;
}

int cmd_condition(const std::string& db_dir, const std::string& evidence_file,
                  const std::string& query_file, const std::string& out_dir,
                  const std::string& rule, bool no_simplify, const EngineFlags& flags) {
  const auto db = read_database(db_dir);
  db.validate();
  WsSet evidence;
  if (!evidence_file.empty() == !query_file.empty()) {
    throw ValidationError("pass exactly one of --evidence and --query");
  }
  if (!evidence_file.empty()) evidence = parse_wsset(read_file(evidence_file), db.world);
  else evidence = evidence_wsset(db, parse_boolean_query(read_file(query_file)));

  const auto eopts = flags.options();
  ConditionOptions opts;
  opts.rule = rule == "published" ? ProductRule::AsPublished : ProductRule::Exact;
  opts.decompose.heuristic = eopts.heuristic;
  opts.decompose.max_nodes = eopts.node_cap;
  opts.decompose.deadline = eopts.deadline;
  auto result = condition_database(db, evidence, opts);
  if (!no_simplify) result.db = simplify(result.db);
  write_database(result.db, out_dir);
  std::cout << format_fixed(result.confidence, 12) << "\n";
  std::cerr << "variables=" << result.db.world.size() << " out=" << out_dir << "\n";
  return kOk;
}

int cmd_generate(const std::string& kind, std::size_t n, std::size_t r, std::size_t s,
                 std::size_t w, std::size_t t, const std::vector<std::string>& columns,
                 std::uint64_t seed, const std::string& out_dir) {
  fs::create_directories(out_dir);
  if (kind == "hard") {
    const auto inst = gen_hard_instance(n, r, s, w, seed);
    write_file(fs::path(out_dir) / "world.csv", serialize(inst.world));
    write_file(fs::path(out_dir) / "wsset.txt", serialize(inst.set, inst.world));
  } else {
    write_database(gen_tuple_independent_db(t, columns, seed), out_dir);
  }
  return kOk;
}

int cmd_bench(const std::string& config_file, const std::string& out_file, unsigned parallel) {
  auto config = BenchConfig::parse(read_file(config_file));
  if (parallel > 0) config.parallel = parallel;
  if (const char* env = std::getenv("WSCOND_CAP"); env && *env) {
    EngineOptions o;
    o.apply_env_cap();
    config.node_cap = o.node_cap;
  }
  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!out_file.empty()) {
    file.open(out_file);
    if (!file) throw ValidationError("cannot write '" + out_file + "'");
    out = &file;
  }
  *out << bench_csv_header() << "\n";
  run_benchmark(config, [&](const BenchRow& row) { *out << to_csv(row) << "\n" << std::flush; });
  return kOk;
}

int cmd_enumerate(const std::string& db_dir, std::uint64_t cap) {
  const auto db = read_database(db_dir);
  db.validate();
  EngineOptions o;
  o.world_cap = cap;
  o.apply_env_cap();
  WorldEnumerator it(db, o.world_cap);
  std::size_t k = 0;
  double total = 0.0;
  while (it.next()) {
    std::vector<Assignment> as;
    for (VarId v = 0; v < db.world.size(); ++v) as.push_back({v, it.valuation()[v]});
    std::cout << "world " << ++k << " " << format_fixed(it.probability(), 12) << " "
              << serialize(WsDescriptor::from_sorted(std::move(as)), db.world) << "\n";
    total += it.probability();
    for (const auto& [name, tuples] : it.instance()) {
      for (const auto& t : tuples) std::cout << "  " << name << "(" << tuple_text(t) << ")\n";
    }
  }
  std::cerr << "worlds=" << k << " total=" << format_fixed(total, 12) << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact and approximate confidence computation and conditioning over U-relations"};
  app.require_subcommand(1);

  EngineFlags conf_flags;
  std::string conf_input, conf_world, conf_relation, conf_query;
  bool conf_per_tuple = false, conf_dump = false;
  auto* conf = app.add_subcommand("confidence", "probability of a ws-set or Boolean query");
  conf->add_option("input", conf_input, "database directory or ws-set file")->required();
  conf->add_option("--world", conf_world, "world table for a ws-set file (default: world.csv beside it)");
  conf->add_option("--relation", conf_relation, "relation whose nonemptiness is measured");
  conf->add_option("--query", conf_query, "Boolean query file (s-expression)");
  conf->add_flag("--per-tuple", conf_per_tuple, "confidence of every distinct tuple of --relation");
  conf->add_flag("--dump-tree", conf_dump, "print the ws-tree to stderr");
  conf_flags.add_to(*conf, true);

  EngineFlags cond_flags;
  std::string cond_db, cond_evidence, cond_query, cond_out, cond_rule = "exact";
  bool cond_no_simplify = false;
  auto* cnd = app.add_subcommand("condition", "assert evidence and write the conditioned database");
  cnd->add_option("db", cond_db, "database directory")->required();
  cnd->add_option("--evidence", cond_evidence, "evidence ws-set file");
  cnd->add_option("--query", cond_query, "evidence Boolean query file");
  cnd->add_option("--out", cond_out, "output directory")->required();
  cnd->add_option("--rule", cond_rule, "⊗ conditioning rule: exact | published")
      ->check(CLI::IsMember({"exact", "published"}));
  cnd->add_flag("--no-simplify", cond_no_simplify, "skip world-table simplification");
  cond_flags.add_to(*cnd, false);

  std::string gen_kind = "hard", gen_out;
  std::size_t gen_n = 50, gen_r = 2, gen_s = 2, gen_w = 100, gen_t = 10;
  std::vector<std::string> gen_columns{"a"};
  std::uint64_t gen_seed = 0;
  auto* gen = app.add_subcommand("generate", "write a synthetic instance");
  gen->add_option("--kind", gen_kind, "hard (world.csv + wsset.txt) | tid (database)")
      ->check(CLI::IsMember({"hard", "tid"}));
  gen->add_option("--n", gen_n, "variables");
  gen->add_option("--r", gen_r, "domain size");
  gen->add_option("--s", gen_s, "descriptor length");
  gen->add_option("--w", gen_w, "descriptors");
  gen->add_option("--t", gen_t, "tuples (tid)");
  gen->add_option("--columns", gen_columns, "column names (tid)")->delimiter(',');
  gen->add_option("--seed", gen_seed, "seed");
  gen->add_option("--out", gen_out, "output directory")->required();

  std::string bench_config, bench_out;
  unsigned bench_parallel = 0;
  auto* bench = app.add_subcommand("bench", "run a benchmark sweep and write CSV");
  bench->add_option("config", bench_config, "key=value config file")->required();
  bench->add_option("--out", bench_out, "CSV file (default: stdout)");
  bench->add_option("--parallel", bench_parallel, "worker threads (correctness-only sweeps)");

  std::string enum_db;
  std::uint64_t enum_cap = kDefaultWorldCap;
  auto* enm = app.add_subcommand("enumerate", "list the possible worlds of a small database");
  enm->add_option("db", enum_db, "database directory")->required();
  enm->add_option("--cap", enum_cap, "maximum number of worlds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (*conf) {
      return cmd_confidence(conf_input, conf_world, conf_relation, conf_query, conf_per_tuple,
                            conf_dump, conf_flags);
    }
    if (*cnd) {
      return cmd_condition(cond_db, cond_evidence, cond_query, cond_out, cond_rule,
                           cond_no_simplify, cond_flags);
    }
    if (*gen) {
      return cmd_generate(gen_kind, gen_n, gen_r, gen_s, gen_w, gen_t, gen_columns, gen_seed,
                          gen_out);
    }
    if (*bench) return cmd_bench(bench_config, bench_out, bench_parallel);
    if (*enm) return cmd_enumerate(enum_db, enum_cap);
  } catch (const UnsatisfiableEvidence& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUnsatisfiable;
  } catch (const ResourceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kResource;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  }
  return kOk;
}
