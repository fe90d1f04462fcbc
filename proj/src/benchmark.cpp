#include "wscond/benchmark.hpp"

#include <cmath>
#include <future>
#include <mutex>
#include <sstream>

#include "wscond/errors.hpp"
#include "wscond/generators.hpp"
#include "wscond/io.hpp"

namespace wscond {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  if (out.empty()) throw ValidationError("empty list '" + s + "'");
  return out;
}

std::uint64_t parse_uint(const std::string& s) {
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != s.size() || s.empty() || s[0] == '-') {
    throw ValidationError("expected a non-negative integer, got '" + s + "'");
  }
  return v;
}

std::vector<std::size_t> parse_sizes(const std::string& s) {
  std::vector<std::size_t> out;
  for (const auto& item : split_list(s)) out.push_back(parse_uint(item));
  return out;
}

}  // namespace

BenchConfig BenchConfig::parse(std::string_view text) {
  BenchConfig c;
  std::stringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ValidationError("config line " + std::to_string(lineno) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "n") c.n = parse_sizes(value);
    else if (key == "r") c.r = parse_sizes(value);
    else if (key == "s") c.s = parse_sizes(value);
    else if (key == "w") c.w = parse_sizes(value);
    else if (key == "algorithms") {
      c.algorithms.clear();
      for (const auto& a : split_list(value)) c.algorithms.push_back(parse_algorithm(a));
    } else if (key == "heuristics") {
      c.heuristics.clear();
      for (const auto& h : split_list(value)) c.heuristics.push_back(parse_heuristic(h));
    } else if (key == "reps") c.reps = parse_uint(value);
    else if (key == "timeout_s") c.timeout_s = parse_double(value);
    else if (key == "seed") c.seed = parse_uint(value);
    else if (key == "epsilon") c.epsilon = parse_double(value);
    else if (key == "delta") c.delta = parse_double(value);
    else if (key == "parallel") c.parallel = static_cast<unsigned>(parse_uint(value));
    else if (key == "verify") c.verify = parse_uint(value) != 0;
    else if (key == "verify_worlds") c.verify_worlds = parse_uint(value);
    else if (key == "node_cap") c.node_cap = parse_uint(value);
    else throw ValidationError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
  }
  if (c.reps == 0) throw ValidationError("reps must be positive");
  if (!(c.timeout_s > 0.0)) throw ValidationError("timeout_s must be positive");
  return c;
}

std::string bench_csv_header() {
  return "n,r,s,w,algorithm,heuristic,rep,seed,value,nodes,time_ms,status";
}

std::string to_csv(const BenchRow& row) {
  std::ostringstream os;
  os << row.n << ',' << row.r << ',' << row.s << ',' << row.w << ',' << row.algorithm << ','
     << row.heuristic << ',' << row.rep << ',' << row.seed << ',' << format_fixed(row.value, 12)
     << ',' << row.nodes << ',' << format_fixed(row.time_ms, 3) << ',' << row.status;
  return os.str();
}

std::uint64_t cell_seed(std::uint64_t seed, std::size_t n, std::size_t r, std::size_t s,
                        std::size_t w, std::size_t rep) {
  // splitmix64 over the cell coordinates.
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  std::uint64_t h = mix(seed);
  for (std::uint64_t v : {std::uint64_t(n), std::uint64_t(r), std::uint64_t(s),
                          std::uint64_t(w), std::uint64_t(rep)}) {
    h = mix(h ^ v);
  }
  return h;
}

namespace {

struct Cell {
  std::size_t n, r, s, w, rep;
  std::uint64_t seed;
};

struct Job {
  Algorithm algorithm;
  std::optional<Heuristic> heuristic;
};

std::vector<BenchRow> run_cell(const BenchConfig& config, const Cell& cell,
                               const std::vector<Job>& jobs) {
  std::vector<BenchRow> rows;
  auto make_row = [&](const Job& job) {
    BenchRow row;
    row.n = cell.n;
    row.r = cell.r;
    row.s = cell.s;
    row.w = cell.w;
    row.algorithm = to_string(job.algorithm);
    row.heuristic = job.heuristic ? to_string(*job.heuristic) : "-";
    row.rep = cell.rep;
    row.seed = cell.seed;
    return row;
  };

  HardInstance inst;
  try {
    inst = gen_hard_instance(cell.n, cell.r, cell.s, cell.w, cell.seed);
  } catch (const Error&) {
    for (const auto& job : jobs) {
      auto row = make_row(job);
      row.status = "error";
      rows.push_back(row);
    }
    return rows;
  }

  std::optional<double> oracle;
  if (config.verify) {
    try {
      oracle = brute_force_probability(inst.set, inst.world, config.verify_worlds);
    } catch (const ResourceError&) {
    }
  }

  for (const auto& job : jobs) {
    auto row = make_row(job);
    EngineOptions opts;
    opts.algorithm = job.algorithm;
    if (job.heuristic) opts.heuristic = *job.heuristic;
    opts.node_cap = config.node_cap;
    opts.epsilon = config.epsilon;
    opts.delta = config.delta;
    opts.seed = cell.seed;
    const auto start = Clock::now();
    opts.deadline = start + std::chrono::duration_cast<Clock::duration>(
                                std::chrono::duration<double>(config.timeout_s));
    try {
      const auto r = compute_confidence(inst.set, inst.world, opts);
      row.time_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
      row.value = r.value;
      row.nodes = r.work;
      row.status = "ok";
      if (oracle && is_exact(job.algorithm) && std::abs(r.value - *oracle) > 1e-9) {
        row.status = "mismatch";
      }
    } catch (const DeadlineExceeded&) {
      row.time_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
      row.status = "timeout";
    } catch (const ResourceError&) {
      row.time_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
      row.status = "resource";
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

std::vector<BenchRow> run_benchmark(const BenchConfig& config,
                                    const std::function<void(const BenchRow&)>& on_row) {
  std::vector<Job> jobs;
  for (auto a : config.algorithms) {
    if (uses_heuristic(a)) {
      for (auto h : config.heuristics) jobs.push_back({a, h});
    } else {
      jobs.push_back({a, std::nullopt});
    }
  }
  std::vector<Cell> cells;
  for (auto n : config.n)
    for (auto r : config.r)
      for (auto s : config.s)
        for (auto w : config.w)
          for (std::size_t rep = 0; rep < config.reps; ++rep)
            cells.push_back({n, r, s, w, rep, cell_seed(config.seed, n, r, s, w, rep)});

  std::vector<BenchRow> out;
  if (config.parallel <= 1) {
    for (const auto& cell : cells) {
      for (auto& row : run_cell(config, cell, jobs)) {
        if (on_row) on_row(row);
        out.push_back(std::move(row));
      }
    }
    return out;
  }

  // Cells are handed out in order to a fixed pool; rows are emitted in sweep order.
  std::vector<std::vector<BenchRow>> results(cells.size());
  std::mutex mu;
  std::size_t next = 0;
  auto worker = [&] {
    for (;;) {
      std::size_t k;
      {
        std::lock_guard lock(mu);
        if (next == cells.size()) return;
        k = next++;
      }
      results[k] = run_cell(config, cells[k], jobs);
    }
  };
  std::vector<std::future<void>> pool;
  for (unsigned t = 0; t < config.parallel; ++t) pool.push_back(std::async(std::launch::async, worker));
  for (auto& f : pool) f.get();
  for (auto& rows : results) {
    for (auto& row : rows) {
      if (on_row) on_row(row);
      out.push_back(std::move(row));
    }
  }
  return out;
}

}  // namespace wscond
