#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "wscond/engine.hpp"

namespace wscond {

// key=value lines, `#` comments, lists comma-separated:
//   n=100  r=2  s=2  w=50,100,300  algorithms=indve,ve,we,kl,brute
//   heuristics=minlog,minmax  reps=3  timeout_s=600  seed=1
//   epsilon=0.1  delta=0.1  parallel=0  verify=1
struct BenchConfig {
  std::vector<std::size_t> n{100};
  std::vector<std::size_t> r{2};
  std::vector<std::size_t> s{2};
  std::vector<std::size_t> w{50};
  std::vector<Algorithm> algorithms{Algorithm::IndVE};
  std::vector<Heuristic> heuristics{Heuristic::MinLog};
  std::size_t reps = 1;
  double timeout_s = 600.0;
  std::uint64_t seed = 1;
  double epsilon = 0.1;
  double delta = 0.1;
  // Worker threads for correctness-only sweeps; timings are then not comparable.
  unsigned parallel = 0;
  // Compare exact results with brute force when the instance is small enough.
  bool verify = true;
  std::uint64_t verify_worlds = 1ULL << 20;
  std::uint64_t node_cap = kDefaultNodeCap;

  static BenchConfig parse(std::string_view text);
};

struct BenchRow {
  std::size_t n = 0, r = 0, s = 0, w = 0;
  std::string algorithm;
  std::string heuristic;  // "-" for algorithms without one
  std::size_t rep = 0;
  std::uint64_t seed = 0;  // instance seed
  double value = 0.0;
  std::uint64_t nodes = 0;
  double time_ms = 0.0;
  // ok | mismatch (disagrees with brute force) | timeout | resource | error
  std::string status;
};

std::string bench_csv_header();
std::string to_csv(const BenchRow& row);

// Instance seed of one (n, r, s, w, rep) cell.
std::uint64_t cell_seed(std::uint64_t seed, std::size_t n, std::size_t r, std::size_t s,
                        std::size_t w, std::size_t rep);

// One row per (n, r, s, w, rep, algorithm, heuristic) in sweep order; timeouts
// and resource exhaustion are reported as censored rows, not errors.
std::vector<BenchRow> run_benchmark(const BenchConfig& config,
                                    const std::function<void(const BenchRow&)>& on_row = {});

}  // namespace wscond
