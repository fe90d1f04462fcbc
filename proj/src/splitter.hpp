#pragma once

// Internal building blocks shared by the decomposition and conditioning
// recursions. Working sets are plain sorted, duplicate-free descriptor vectors.

#include <optional>
#include <vector>

#include "wscond/budget.hpp"
#include "wscond/decompose.hpp"
#include "wscond/descriptor.hpp"
#include "wscond/world_table.hpp"

namespace wscond::detail {

using DescList = std::vector<WsDescriptor>;

void canonicalize(DescList& s);

struct Split {
  VarId var = 0;
  DescList rest;                 // T
  std::vector<DescList> stripped;  // S_{x↦i} per value, unsorted
};

// Scratch-owning helper; one instance per thread.
class Splitter {
 public:
  explicit Splitter(const WorldTable& w);
  // Partition-only splitter over variable ids [0, num_vars).
  explicit Splitter(std::size_t num_vars);

  // Components of the co-occurrence graph; s nonempty, no universal descriptor.
  std::vector<DescList> partition(const DescList& s);

  VarId choose(const DescList& s, Heuristic h);

  // s without the descriptors that extend another member (same ω), or
  // nullopt when none does. s canonical, without the universal descriptor.
  std::optional<DescList> without_subsumed(const DescList& s);

  // Splits s on x. Each stripped list is left unsorted.
  Split eliminate(const DescList& s, VarId x) const;

  // Sorted, deduplicated S_{x↦i} ∪ T.
  static DescList child(const DescList& stripped, const DescList& rest);

  // Per-value occurrence counts of x (and how many descriptors mention x).
  struct Counts {
    std::vector<std::size_t> per_value;
    std::size_t total = 0;
  };
  Counts count(const DescList& s, VarId x) const;

 private:
  const WorldTable* w_ = nullptr;
  std::vector<std::size_t> offset_;  // start of each variable's counters
  std::vector<std::size_t> counts_;  // per (variable, value)
  std::vector<std::size_t> totals_;  // per variable
  std::vector<VarId> parent_;        // union-find
  std::vector<std::size_t> component_;
  std::vector<std::uint32_t> stamp_;
  std::uint32_t epoch_ = 0;
  std::vector<std::pair<std::uint64_t, std::uint32_t>> hashes_;
};

// log2(Σ 2^{t}) over the terms, computed incrementally without overflow.
double log2_sum_exp2(const std::vector<double>& terms);

double minlog_cost(std::span<const std::size_t> per_value, std::size_t rest);
std::size_t minmax_cost(std::span<const std::size_t> per_value, std::size_t rest);

// Fused translation of a canonical list, drawing on an existing budget.
double probability(const DescList& s, const WorldTable& w, const DecomposeOptions& opts,
                   Budget& budget);

}  // namespace wscond::detail
