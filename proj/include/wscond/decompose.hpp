#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wscond/budget.hpp"
#include "wscond/descriptor.hpp"
#include "wscond/world_table.hpp"

namespace wscond {

enum class Heuristic { MinLog, MinMax };

struct WsBranch;

// A ws-tree: ⊗ nodes over variable-disjoint children (their world-sets are
// unioned), ⊕ nodes branching on distinct values of one variable, the
// universal leaf ∅ (Top) and the empty leaf ⊥ (Bottom). Nodes are immutable
// and may be shared between branches.
class WsTree {
 public:
  enum class Kind { Top, Bottom, Times, Plus };

  static WsTree top();
  static WsTree bottom();
  static WsTree times(std::vector<WsTree> children);
  static WsTree plus(VarId var, std::vector<WsBranch> branches);

  Kind kind() const;
  std::span<const WsTree> children() const;   // Times only
  VarId variable() const;                     // Plus only
  std::span<const WsBranch> branches() const;  // Plus only

  struct Node;

 private:
  explicit WsTree(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

struct WsBranch {
  ValueIdx value;
  WsTree child;
};

inline constexpr std::uint64_t kDefaultNodeCap = 100'000'000;

struct DecomposeOptions {
  Heuristic heuristic = Heuristic::MinLog;
  // false gives the VE variant (variable elimination only).
  bool partitioning = true;
  std::uint64_t max_nodes = kDefaultNodeCap;
  std::optional<Clock::time_point> deadline{};
  // Independent components near the root may be evaluated on extra threads.
  unsigned threads = 1;
};

struct ConfidenceResult {
  double value = 0.0;
  std::uint64_t nodes = 0;
};

// Finest partition of s into pairwise independent ws-sets (connected
// components of the variable co-occurrence graph), in order of first descriptor.
std::vector<WsSet> independent_partition(const WsSet& s);

struct Elimination {
  WsSet rest;                    // T: descriptors not mentioning x
  std::vector<WsSet> by_value;   // S_{x↦i} with x↦i stripped, indexed by value
};

// Throws ValidationError when x does not occur in s.
Elimination eliminate_variable(const WsSet& s, VarId x, const WorldTable& w);

// log2 of the translation cost Σ_i 2^{s_i} with s_i = |S_{x↦i}| + |T|, where
// T contributes 2^{|T|} once if some value of x does not occur in s.
double estimate_minlog(const WsSet& s, VarId x, const WorldTable& w);
// max_i |S_{x↦i}| + |T| over values of x occurring in s.
std::size_t estimate_minmax(const WsSet& s, VarId x, const WorldTable& w);

// Variable a heuristic picks for s (lowest id among ties).
VarId choose_variable(const WsSet& s, const WorldTable& w, Heuristic h);

WsTree compute_tree(const WsSet& s, const WorldTable& w, const DecomposeOptions& opts = {});

// One bottom-up pass.
double tree_probability(const WsTree& r, const WorldTable& w);

// Probability of ω(s) by the fused translation, without materializing a tree.
ConfidenceResult confidence(const WsSet& s, const WorldTable& w,
                            const DecomposeOptions& opts = {});

// Root-to-leaf annotation sets; ω(paths(r)) = ω(r).
WsSet tree_paths(const WsTree& r);

// Empty string when r satisfies the ws-tree constraints over w, else a reason.
std::string check_tree(const WsTree& r, const WorldTable& w);

std::size_t tree_size(const WsTree& r);

// Indented text dump: `*` (⊗), `+x` (⊕ on x), `T` (∅ leaf), `F` (⊥), each ⊕
// child prefixed by its edge label `x=i@p`.
std::string dump(const WsTree& r, const WorldTable& w);

}  // namespace wscond
