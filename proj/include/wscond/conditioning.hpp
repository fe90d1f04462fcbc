#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <vector>

#include "wscond/decompose.hpp"
#include "wscond/descriptor.hpp"
#include "wscond/urelation.hpp"
#include "wscond/world_table.hpp"

namespace wscond {

// How a ⊗ node (union of independent children) is conditioned.
enum class ProductRule {
  // c = 1 - Π(1 - c_i), U' = ∪ U'_i, each child conditioned on its own. This
  // is the textbook rule; it renormalizes correctly only when at most one
  // child has confidence below 1.
  AsPublished,
  // E1 ∨ E2 ∨ ... is rewritten as E1 ⊕ (¬E1 ∧ (E2 ∨ ...)) with a fresh binary
  // selector variable; negated children are conditioned through the same
  // recursion with flipped leaves. Descriptors sharing no variable with a
  // subproblem pass through it unchanged.
  Exact,
};

// A descriptor tagged with the row it came from.
struct TaggedDescriptor {
  std::uint64_t tag = 0;
  WsDescriptor wsd;

  friend auto operator<=>(const TaggedDescriptor&, const TaggedDescriptor&) = default;
  friend bool operator==(const TaggedDescriptor&, const TaggedDescriptor&) = default;
};

struct ConditionOptions {
  ProductRule rule = ProductRule::Exact;
  DecomposeOptions decompose;
};

struct ConditioningResult {
  double confidence = 0.0;
  // Input world table followed by the fresh variables (ΔW).
  WorldTable world;
  VarId first_fresh = 0;
  // Rewritten descriptors, sorted and duplicate-free.
  std::vector<TaggedDescriptor> rewritten;
  std::uint64_t nodes = 0;

  std::span<const TaggedDescriptor> descriptors() const { return rewritten; }
  WsSet rewritten_set() const;
};

// Conditions the descriptors `u` on the world-set of the ws-tree `r`. Fresh
// variables are named `<source>'<n>`; selector variables `sel'<n>`. Returns
// confidence 0 (and no descriptors) when ω(r) has probability 0.
ConditioningResult cond(const WsTree& r, std::span<const TaggedDescriptor> u,
                        const WorldTable& w, ProductRule rule = ProductRule::Exact);
ConditioningResult cond(const WsTree& r, const WsSet& u, const WorldTable& w,
                        ProductRule rule = ProductRule::Exact);

// Same, fused with the translation of `evidence` (no tree is materialized).
ConditioningResult cond_fused(const WsSet& evidence, std::span<const TaggedDescriptor> u,
                              const WorldTable& w, const ConditionOptions& opts = {});

struct ConditionedDatabase {
  ProbabilisticDatabase db;
  double confidence = 0.0;
};

// assert_φ: the database whose worlds are the worlds of `evidence`, weights
// divided by its confidence. Throws UnsatisfiableEvidence when that is 0.
ConditionedDatabase condition_database(const ProbabilisticDatabase& db, const WsSet& evidence,
                                       const ConditionOptions& opts = {});
ProbabilisticDatabase assert_evidence(const ProbabilisticDatabase& db, const WsSet& evidence,
                                      const ConditionOptions& opts = {});

// World-table simplifications, applied to a fixpoint:
//  1. drop variables no U-relation mentions;
//  2. drop singleton-domain variables everywhere;
//  3. merge copies of the same source variable (`x'3`, `x'7`) with identical
//     alternatives and weights whose descriptors are pairwise mutex.
ProbabilisticDatabase simplify(const ProbabilisticDatabase& db);

// Name up to the first prime: `x'3'9` → `x`.
std::string source_name(std::string_view fresh_name);

}  // namespace wscond
