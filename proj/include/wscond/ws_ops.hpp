#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "wscond/descriptor.hpp"
#include "wscond/world_table.hpp"

namespace wscond {

inline constexpr std::uint64_t kDefaultDiffCap = 10'000'000;

// { d1 ∪ d2 | d1 ∈ s1, d2 ∈ s2, consistent }.
WsSet intersect(const WsSet& s1, const WsSet& s2);

WsSet unite(const WsSet& s1, const WsSet& s2);

// Diff({d1}, {d2}). The variables of d2 − d1 are enumerated in ascending id
// order; the returned descriptors are pairwise mutex.
WsSet diff_singleton(const WsDescriptor& d1, const WsDescriptor& d2, const WorldTable& w);

// Diff(s1, s2), folding s2 in canonical order. Each descriptor of s1 also has
// the later ones of s1 subtracted, so the result is pairwise mutex even when
// s1 is not. Throws ResourceError when an intermediate set exceeds `cap`.
WsSet diff(const WsSet& s1, const WsSet& s2, const WorldTable& w,
           std::uint64_t cap = kDefaultDiffCap);

// Lazily yields the descriptors of Diff({d}, s) one at a time by a depth-first
// walk over the subtrahends, so only one root-to-leaf chain is held in memory.
class DiffStream {
 public:
  DiffStream(WsDescriptor d, const WsSet& s, const WorldTable& w,
             std::uint64_t cap = kDefaultDiffCap);
  DiffStream(WsDescriptor d, std::span<const WsDescriptor> s, const WorldTable& w,
             std::uint64_t cap = kDefaultDiffCap);

  // Next descriptor, or nullopt when exhausted. Throws ResourceError after
  // `cap` descriptors.
  std::optional<WsDescriptor> next();

  std::uint64_t produced() const { return produced_; }

 private:
  struct Frame {
    WsDescriptor base;        // descriptor being differenced
    std::size_t level;        // index of the subtrahend applied next
    std::vector<Assignment> rest;  // d2 − base, ascending
    std::size_t k;            // position within rest
    ValueIdx alt;             // next alternative value for rest[k]
  };

  void push(WsDescriptor base, std::size_t level);

  std::span<const WsDescriptor> subtrahends_;
  const WorldTable* w_;
  std::uint64_t cap_;
  std::uint64_t produced_ = 0;
  std::vector<Frame> stack_;
  std::optional<WsDescriptor> ready_;
};

}  // namespace wscond
