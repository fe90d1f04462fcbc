#include "wscond/ws_ops.hpp"

#include <algorithm>
#include <string>

#include "wscond/errors.hpp"

namespace wscond {

namespace {

// Assignments of d2 whose variable is not assigned by d1; d1, d2 consistent.
std::vector<Assignment> missing_from(const WsDescriptor& d1, const WsDescriptor& d2) {
  std::vector<Assignment> out;
  std::size_t i = 0;
  for (const auto& a : d2) {
    while (i < d1.size() && d1[i].var < a.var) ++i;
    if (i < d1.size() && d1[i].var == a.var) continue;
    out.push_back(a);
  }
  return out;
}

[[noreturn]] void too_large(std::uint64_t cap) {
  throw ResourceError("ws-set difference exceeds cap of " + std::to_string(cap) +
                      " descriptors");
}

}  // namespace

WsSet intersect(const WsSet& s1, const WsSet& s2) {
  std::vector<WsDescriptor> out;
  for (const auto& a : s1) {
    for (const auto& b : s2) {
      if (consistent(a, b)) out.push_back(merge(a, b));
    }
  }
  return WsSet(std::move(out));
}

WsSet unite(const WsSet& s1, const WsSet& s2) {
  std::vector<WsDescriptor> out(s1.begin(), s1.end());
  out.insert(out.end(), s2.begin(), s2.end());
  return WsSet(std::move(out));
}

WsSet diff_singleton(const WsDescriptor& d1, const WsDescriptor& d2, const WorldTable& w) {
  validate(d1, w);
  validate(d2, w);
  if (!consistent(d1, d2)) return WsSet{d1};
  const auto rest = missing_from(d1, d2);
  std::vector<WsDescriptor> out;
  WsDescriptor prefix = d1;
  for (const auto& a : rest) {
    const auto dom = static_cast<ValueIdx>(w.domain_size(a.var));
    for (ValueIdx alt = 0; alt < dom; ++alt) {
      if (alt != a.value) out.push_back(prefix.with(a.var, alt));
    }
    prefix = prefix.with(a.var, a.value);
  }
  return WsSet(std::move(out));
}

WsSet diff(const WsSet& s1, const WsSet& s2, const WorldTable& w, std::uint64_t cap) {
  std::vector<WsDescriptor> result;
  const auto left = s1.descriptors();
  for (std::size_t k = 0; k < left.size(); ++k) {
    // Later descriptors of s1 are subtracted too, so overlapping minuends
    // still give a pairwise mutex result. For mutex s1 this changes nothing.
    std::vector<WsDescriptor> subs(s2.begin(), s2.end());
    subs.insert(subs.end(), left.begin() + k + 1, left.end());
    std::vector<WsDescriptor> current{left[k]};
    for (const auto& sub : subs) {
      std::vector<WsDescriptor> next;
      for (const auto& c : current) {
        auto part = diff_singleton(c, sub, w);
        for (const auto& e : part) {
          next.push_back(e);
          if (next.size() > cap) too_large(cap);
        }
      }
      current = std::move(next);
      if (current.empty()) break;
    }
    result.insert(result.end(), current.begin(), current.end());
    if (result.size() > cap) too_large(cap);
  }
  return WsSet(std::move(result));
}

DiffStream::DiffStream(WsDescriptor d, const WsSet& s, const WorldTable& w,
                       std::uint64_t cap)
    : DiffStream(std::move(d), s.descriptors(), w, cap) {}

DiffStream::DiffStream(WsDescriptor d, std::span<const WsDescriptor> s,
                       const WorldTable& w, std::uint64_t cap)
    : subtrahends_(s), w_(&w), cap_(cap) {
  validate(d, w);
  for (const auto& e : s) validate(e, w);
  push(std::move(d), 0);
}

void DiffStream::push(WsDescriptor base, std::size_t level) {
  // Subtrahends inconsistent with base leave it unchanged.
  while (level < subtrahends_.size() && !consistent(base, subtrahends_[level])) {
    ++level;
  }
  if (level == subtrahends_.size()) {
    ready_ = std::move(base);
    return;
  }
  auto rest = missing_from(base, subtrahends_[level]);
  if (rest.empty()) return;  // base ⊆ subtrahend: nothing survives
  stack_.push_back(Frame{std::move(base), level, std::move(rest), 0, 0});
}

std::optional<WsDescriptor> DiffStream::next() {
  while (!ready_) {
    if (stack_.empty()) return std::nullopt;
    Frame& f = stack_.back();
    if (f.k == f.rest.size()) {
      stack_.pop_back();
      continue;
    }
    const Assignment& a = f.rest[f.k];
    const auto dom = static_cast<ValueIdx>(w_->domain_size(a.var));
    if (f.alt == a.value) ++f.alt;
    if (f.alt >= dom) {
      f.base = f.base.with(a.var, a.value);
      ++f.k;
      f.alt = 0;
      continue;
    }
    WsDescriptor child = f.base.with(a.var, f.alt);
    ++f.alt;
    const std::size_t level = f.level + 1;
    push(std::move(child), level);
  }
  if (++produced_ > cap_) too_large(cap_);
  auto out = std::move(ready_);
  ready_.reset();
  return out;
}

}  // namespace wscond
