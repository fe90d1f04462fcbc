#include "wscond/engine.hpp"

#include <cstdlib>

#include "wscond/errors.hpp"
#include "wscond/karp_luby.hpp"
#include "wscond/wselim.hpp"

namespace wscond {

Algorithm parse_algorithm(std::string_view s) {
  if (s == "indve") return Algorithm::IndVE;
  if (s == "ve") return Algorithm::VE;
  if (s == "we") return Algorithm::WE;
  if (s == "kl") return Algorithm::KL;
  if (s == "brute") return Algorithm::Brute;
  throw ValidationError("unknown algorithm '" + std::string(s) + "'");
}

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::IndVE: return "indve";
    case Algorithm::VE: return "ve";
    case Algorithm::WE: return "we";
    case Algorithm::KL: return "kl";
    case Algorithm::Brute: return "brute";
  }
  return "?";
}

Heuristic parse_heuristic(std::string_view s) {
  if (s == "minlog") return Heuristic::MinLog;
  if (s == "minmax") return Heuristic::MinMax;
  throw ValidationError("unknown heuristic '" + std::string(s) + "'");
}

std::string to_string(Heuristic h) { return h == Heuristic::MinLog ? "minlog" : "minmax"; }

bool is_exact(Algorithm a) { return a != Algorithm::KL; }

bool uses_heuristic(Algorithm a) { return a == Algorithm::IndVE || a == Algorithm::VE; }

void EngineOptions::apply_env_cap() {
  const char* env = std::getenv("WSCOND_CAP");
  if (!env || !*env) return;
  char* end = nullptr;
  const unsigned long long cap = std::strtoull(env, &end, 10);
  if (*end != '\0' || cap == 0) throw ValidationError("WSCOND_CAP must be a positive integer");
  node_cap = diff_cap = world_cap = cap;
}

EngineResult compute_confidence(const WsSet& input, const WorldTable& w,
                                const EngineOptions& opts) {
  validate(input, w);
  const WsSet s = normalize(input, w);
  switch (opts.algorithm) {
    case Algorithm::IndVE:
    case Algorithm::VE: {
      DecomposeOptions d;
      d.heuristic = opts.heuristic;
      d.partitioning = opts.algorithm == Algorithm::IndVE;
      d.max_nodes = opts.node_cap;
      d.deadline = opts.deadline;
      d.threads = opts.threads;
      auto r = confidence(s, w, d);
      return {r.value, r.nodes};
    }
    case Algorithm::WE: {
      EliminationOptions e;
      e.diff_cap = opts.diff_cap;
      e.max_terms = opts.node_cap;
      e.deadline = opts.deadline;
      auto r = probability_by_elimination(s, w, e);
      return {r.value, r.terms};
    }
    case Algorithm::KL: {
      KarpLubyOptions k;
      k.epsilon = opts.epsilon;
      k.delta = opts.delta;
      k.seed = opts.seed;
      k.fixed = opts.kl_fixed;
      k.deadline = opts.deadline;
      auto r = karp_luby_confidence(s, w, k);
      return {r.estimate, r.iterations};
    }
    case Algorithm::Brute: {
      const double p = brute_force_probability(s, w, opts.world_cap, opts.deadline);
      // Within the cap once enumeration succeeded.
      std::vector<bool> seen(w.size(), false);
      std::uint64_t worlds = s.empty() ? 0 : 1;
      for (const auto& d : s)
        for (const auto& a : d)
          if (!seen[a.var]) {
            seen[a.var] = true;
            worlds *= w.domain_size(a.var);
          }
      return {p, worlds};
    }
  }
  return {};
}

}  // namespace wscond
