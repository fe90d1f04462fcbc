#include "wscond/descriptor.hpp"

#include <algorithm>

#include "wscond/errors.hpp"

namespace wscond {

WsDescriptor::WsDescriptor(std::vector<Assignment> assignments)
    : items_(assignments.begin(), assignments.end()) {
  std::sort(items_.begin(), items_.end());
  items_.erase(std::unique(items_.begin(), items_.end()), items_.end());
  for (std::size_t i = 1; i < items_.size(); ++i) {
    if (items_[i].var == items_[i - 1].var) {
      throw ValidationError("descriptor assigns a variable twice");
    }
  }
}

WsDescriptor WsDescriptor::from_sorted(std::span<const Assignment> sorted) {
  WsDescriptor d;
  d.items_.assign(sorted.begin(), sorted.end());
  return d;
}

std::optional<ValueIdx> WsDescriptor::value_of(VarId v) const {
  auto it = std::lower_bound(items_.begin(), items_.end(), v,
                             [](const Assignment& a, VarId x) { return a.var < x; });
  if (it == items_.end() || it->var != v) return std::nullopt;
  return it->value;
}

WsDescriptor WsDescriptor::with(VarId v, ValueIdx i) const {
  WsDescriptor out = *this;
  auto it = std::lower_bound(out.items_.begin(), out.items_.end(), v,
                             [](const Assignment& a, VarId x) { return a.var < x; });
  if (it != out.items_.end() && it->var == v) {
    it->value = i;
  } else {
    out.items_.insert(it, Assignment{v, i});
  }
  return out;
}

WsDescriptor WsDescriptor::without(VarId v) const {
  WsDescriptor out;
  out.items_.reserve(items_.size());
  for (const auto& a : items_) {
    if (a.var != v) out.items_.push_back(a);
  }
  return out;
}

std::size_t WsDescriptorHash::operator()(const WsDescriptor& d) const noexcept {
  std::size_t h = 0xcbf29ce484222325ULL;
  for (const auto& a : d) {
    h ^= (static_cast<std::size_t>(a.var) << 32) ^ a.value;
    h *= 0x100000001b3ULL;
  }
  return h;
}

WsSet::WsSet(std::vector<WsDescriptor> descriptors) : items_(std::move(descriptors)) {
  std::sort(items_.begin(), items_.end());
  items_.erase(std::unique(items_.begin(), items_.end()), items_.end());
}

bool WsSet::contains(const WsDescriptor& d) const {
  return std::binary_search(items_.begin(), items_.end(), d);
}

void WsSet::insert(WsDescriptor d) {
  auto it = std::lower_bound(items_.begin(), items_.end(), d);
  if (it != items_.end() && *it == d) return;
  items_.insert(it, std::move(d));
}

void validate(const WsDescriptor& d, const WorldTable& w) {
  for (const auto& a : d) {
    if (!w.contains(a.var)) {
      throw ValidationError("descriptor references unknown variable id " +
                            std::to_string(a.var));
    }
    if (!w.valid(a.var, a.value)) {
      throw ValidationError("value index " + std::to_string(a.value) +
                            " out of domain of '" + w.name(a.var) + "'");
    }
  }
}

void validate(const WsSet& s, const WorldTable& w) {
  for (const auto& d : s) validate(d, w);
}

double descriptor_probability(const WsDescriptor& d, const WorldTable& w) {
  validate(d, w);
  double p = 1.0;
  for (const auto& a : d) p *= w.prob(a.var, a.value);
  return p;
}

WsDescriptor normalize(const WsDescriptor& d, const WorldTable& w) {
  validate(d, w);
  std::vector<Assignment> kept;
  kept.reserve(d.size());
  for (const auto& a : d) {
    if (w.domain_size(a.var) > 1) kept.push_back(a);
  }
  return WsDescriptor::from_sorted(std::move(kept));
}

WsSet normalize(const WsSet& s, const WorldTable& w) {
  std::vector<WsDescriptor> out;
  out.reserve(s.size());
  for (const auto& d : s) out.push_back(normalize(d, w));
  return WsSet(std::move(out));
}

namespace {

// Walks the two sorted assignment lists in lockstep.
template <typename OnShared, typename OnOnlyFirst>
void merge_walk(const WsDescriptor& a, const WsDescriptor& b, OnShared&& shared,
                OnOnlyFirst&& only_first) {
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].var < b[j].var) {
      if (!only_first(a[i])) return;
      ++i;
    } else if (b[j].var < a[i].var) {
      ++j;
    } else {
      if (!shared(a[i], b[j])) return;
      ++i;
      ++j;
    }
  }
  for (; i < a.size(); ++i) {
    if (!only_first(a[i])) return;
  }
}

}  // namespace

bool consistent(const WsDescriptor& d1, const WsDescriptor& d2) {
  bool ok = true;
  merge_walk(
      d1, d2,
      [&](const Assignment& x, const Assignment& y) {
        if (x.value != y.value) ok = false;
        return ok;
      },
      [](const Assignment&) { return true; });
  return ok;
}

bool is_mutex(const WsDescriptor& d1, const WsDescriptor& d2) {
  return !consistent(d1, d2);
}

bool is_independent(const WsDescriptor& d1, const WsDescriptor& d2) {
  bool shared_var = false;
  merge_walk(
      d1, d2,
      [&](const Assignment&, const Assignment&) {
        shared_var = true;
        return false;
      },
      [](const Assignment&) { return true; });
  return !shared_var;
}

bool contains(const WsDescriptor& d1, const WsDescriptor& d2) {
  // Every assignment of d2 must occur in d1.
  std::size_t i = 0;
  for (const auto& a : d2) {
    while (i < d1.size() && d1[i].var < a.var) ++i;
    if (i == d1.size() || d1[i] != a) return false;
  }
  return true;
}

bool wsset_mutex(const WsSet& s1, const WsSet& s2) {
  for (const auto& a : s1) {
    for (const auto& b : s2) {
      if (!is_mutex(a, b)) return false;
    }
  }
  return true;
}

bool wsset_independent(const WsSet& s1, const WsSet& s2) {
  for (const auto& a : s1) {
    for (const auto& b : s2) {
      if (!is_independent(a, b)) return false;
    }
  }
  return true;
}

WsDescriptor merge(const WsDescriptor& d1, const WsDescriptor& d2) {
  std::vector<Assignment> out;
  out.reserve(d1.size() + d2.size());
  std::set_union(d1.begin(), d1.end(), d2.begin(), d2.end(), std::back_inserter(out));
  return WsDescriptor(std::move(out));
}

}  // namespace wscond
