#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "wscond/budget.hpp"
#include "wscond/decompose.hpp"
#include "wscond/generators.hpp"
#include "wscond/ws_ops.hpp"

namespace wscond {

// INDVE: decomposition with independent partitioning; VE: variable elimination
// only; WE: ws-descriptor elimination; KL: Karp-Luby; Brute: enumeration.
enum class Algorithm { IndVE, VE, WE, KL, Brute };

Algorithm parse_algorithm(std::string_view s);
std::string to_string(Algorithm a);
Heuristic parse_heuristic(std::string_view s);
std::string to_string(Heuristic h);

bool is_exact(Algorithm a);
bool uses_heuristic(Algorithm a);

struct EngineOptions {
  Algorithm algorithm = Algorithm::IndVE;
  Heuristic heuristic = Heuristic::MinLog;
  std::uint64_t node_cap = kDefaultNodeCap;
  std::uint64_t diff_cap = kDefaultDiffCap;
  std::uint64_t world_cap = kDefaultWorldCap;
  std::optional<Clock::time_point> deadline{};
  double epsilon = 0.1;
  double delta = 0.1;
  std::uint64_t seed = 0;
  bool kl_fixed = false;
  unsigned threads = 1;

  // WSCOND_CAP, when set, replaces all three caps.
  void apply_env_cap();
};

struct EngineResult {
  double value = 0.0;
  // Subproblems (INDVE/VE), difference terms (WE), trials (KL), worlds (brute).
  std::uint64_t work = 0;
};

// s is normalized against w first.
EngineResult compute_confidence(const WsSet& s, const WorldTable& w, const EngineOptions& opts);

}  // namespace wscond
