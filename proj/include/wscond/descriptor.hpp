#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <optional>
#include <span>
#include <vector>

#include <boost/container/small_vector.hpp>

#include "wscond/world_table.hpp"

namespace wscond {

struct Assignment {
  VarId var = 0;
  ValueIdx value = 0;

  friend auto operator<=>(const Assignment&, const Assignment&) = default;
};

// A world-set descriptor: a partial valuation, at most one assignment per
// variable, kept sorted by variable id. The empty descriptor denotes all worlds.
class WsDescriptor {
 public:
  WsDescriptor() = default;
  // Sorts the assignments; throws ValidationError if a variable is assigned twice
  // with different values (identical repeats are collapsed).
  explicit WsDescriptor(std::vector<Assignment> assignments);
  WsDescriptor(std::initializer_list<Assignment> assignments)
      : WsDescriptor(std::vector<Assignment>(assignments)) {}

  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  auto begin() const { return items_.begin(); }
  auto end() const { return items_.end(); }
  std::span<const Assignment> assignments() const { return {items_.data(), items_.size()}; }
  const Assignment& operator[](std::size_t i) const { return items_[i]; }

  std::optional<ValueIdx> value_of(VarId v) const;
  bool mentions(VarId v) const { return value_of(v).has_value(); }

  // Copy with v↦i set (replacing any existing assignment to v).
  WsDescriptor with(VarId v, ValueIdx i) const;
  // Copy without any assignment to v.
  WsDescriptor without(VarId v) const;

  friend std::strong_ordering operator<=>(const WsDescriptor& a, const WsDescriptor& b) {
    return std::lexicographical_compare_three_way(a.items_.begin(), a.items_.end(),
                                                  b.items_.begin(), b.items_.end());
  }
  friend bool operator==(const WsDescriptor& a, const WsDescriptor& b) {
    return a.items_ == b.items_;
  }

  // Builds from an already sorted, functional assignment list.
  static WsDescriptor from_sorted(std::span<const Assignment> sorted);

 private:
  // Descriptors are short; keep them off the heap.
  boost::container::small_vector<Assignment, 4> items_;
};

struct WsDescriptorHash {
  std::size_t operator()(const WsDescriptor& d) const noexcept;
};

// A ws-set: a set of descriptors denoting the union of their world-sets.
// Stored sorted and duplicate-free, which is also the canonical order used by
// every order-dependent algorithm (diff folding, elimination order).
class WsSet {
 public:
  WsSet() = default;
  explicit WsSet(std::vector<WsDescriptor> descriptors);
  WsSet(std::initializer_list<WsDescriptor> descriptors)
      : WsSet(std::vector<WsDescriptor>(descriptors)) {}

  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  auto begin() const { return items_.begin(); }
  auto end() const { return items_.end(); }
  const WsDescriptor& operator[](std::size_t i) const { return items_[i]; }
  std::span<const WsDescriptor> descriptors() const { return items_; }

  bool contains(const WsDescriptor& d) const;
  // True iff the universal descriptor is a member.
  bool has_universal() const { return !items_.empty() && items_.front().empty(); }

  void insert(WsDescriptor d);

  friend bool operator==(const WsSet&, const WsSet&) = default;

 private:
  std::vector<WsDescriptor> items_;
};

// Throws ValidationError unless every assignment names a variable of w and a
// value of its domain.
void validate(const WsDescriptor& d, const WorldTable& w);
void validate(const WsSet& s, const WorldTable& w);

// P(d): product of assignment weights; 1 for the empty descriptor.
double descriptor_probability(const WsDescriptor& d, const WorldTable& w);

// Drops assignments to singleton-domain variables.
WsDescriptor normalize(const WsDescriptor& d, const WorldTable& w);
WsSet normalize(const WsSet& s, const WorldTable& w);

// True iff d1 ∪ d2 is functional.
bool consistent(const WsDescriptor& d1, const WsDescriptor& d2);

// Syntactic checks; callers normalize first.
bool is_mutex(const WsDescriptor& d1, const WsDescriptor& d2);
bool is_independent(const WsDescriptor& d1, const WsDescriptor& d2);
// ω(d1) ⊆ ω(d2), i.e. d1 extends d2.
bool contains(const WsDescriptor& d1, const WsDescriptor& d2);

bool wsset_mutex(const WsSet& s1, const WsSet& s2);
bool wsset_independent(const WsSet& s1, const WsSet& s2);

// d1 ∪ d2; precondition consistent(d1, d2).
WsDescriptor merge(const WsDescriptor& d1, const WsDescriptor& d2);

}  // namespace wscond
