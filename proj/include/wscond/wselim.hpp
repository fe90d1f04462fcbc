#pragma once

#include <cstdint>
#include <optional>

#include "wscond/budget.hpp"
#include "wscond/decompose.hpp"
#include "wscond/descriptor.hpp"
#include "wscond/ws_ops.hpp"
#include "wscond/world_table.hpp"

namespace wscond {

struct EliminationOptions {
  // Per-descriptor cap on the streamed difference.
  std::uint64_t diff_cap = kDefaultDiffCap;
  // Cap on the total number of summed difference descriptors.
  std::uint64_t max_terms = kDefaultNodeCap;
  std::optional<Clock::time_point> deadline{};
};

struct EliminationResult {
  double value = 0.0;
  std::uint64_t terms = 0;
};

// P_w: with d1..dn in canonical order, P_w(S) = Σ_k Σ_{d ∈ {d_k} − {d_{k+1},…,d_n}} P(d).
// Each difference is streamed and summed without being stored.
EliminationResult probability_by_elimination(const WsSet& s, const WorldTable& w,
                                             const EliminationOptions& opts = {});

// ⋃_{k<n} ({d_k} − {d_{k+1},…,d_n}) ∪ {d_n}: an equivalent pairwise mutex ws-set.
WsSet mutex_rewrite(const WsSet& s, const WorldTable& w, std::uint64_t cap = kDefaultDiffCap);

}  // namespace wscond
