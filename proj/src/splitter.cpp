#include "splitter.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

namespace wscond::detail {

void canonicalize(DescList& s) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
}

Splitter::Splitter(std::size_t num_vars)
    : offset_(num_vars + 1, 0), totals_(num_vars, 0), parent_(num_vars, 0),
      component_(num_vars, 0), stamp_(num_vars, 0) {}

Splitter::Splitter(const WorldTable& w)
    : w_(&w), offset_(w.size() + 1, 0), totals_(w.size(), 0), parent_(w.size(), 0),
      component_(w.size(), 0), stamp_(w.size(), 0) {
  for (VarId v = 0; v < w.size(); ++v) offset_[v + 1] = offset_[v] + w.domain_size(v);
  counts_.assign(offset_.back(), 0);
}

std::vector<DescList> Splitter::partition(const DescList& s) {
  if (++epoch_ == 0) {
    std::fill(stamp_.begin(), stamp_.end(), 0);
    epoch_ = 1;
  }
  auto find = [&](VarId v) {
    while (parent_[v] != v) {
      parent_[v] = parent_[parent_[v]];
      v = parent_[v];
    }
    return v;
  };
  for (const auto& d : s) {
    for (const auto& a : d) {
      if (stamp_[a.var] != epoch_) {
        stamp_[a.var] = epoch_;
        parent_[a.var] = a.var;
      }
    }
    const VarId first = find(d[0].var);
    for (std::size_t k = 1; k < d.size(); ++k) {
      const VarId r = find(d[k].var);
      if (r != first) parent_[r] = first;
    }
  }
  constexpr auto kNone = std::numeric_limits<std::size_t>::max();
  for (const auto& d : s) component_[find(d[0].var)] = kNone;
  std::vector<DescList> out;
  for (const auto& d : s) {
    auto& idx = component_[find(d[0].var)];
    if (idx == kNone) {
      idx = out.size();
      out.emplace_back();
    }
    out[idx].push_back(d);
  }
  return out;
}

namespace {

std::uint64_t assignment_hash(const Assignment& a) {
  std::uint64_t z = (std::uint64_t{a.var} << 32 | a.value) + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Sub-descriptors probed per descriptor: all of them up to this size, beyond
// it only single assignments.
constexpr std::size_t kFullProbe = 8;

}  // namespace

std::optional<DescList> Splitter::without_subsumed(const DescList& s) {
  std::size_t lo = s.front().size(), hi = lo;
  for (const auto& d : s) {
    lo = std::min(lo, d.size());
    hi = std::max(hi, d.size());
  }
  if (lo == hi) return std::nullopt;

  // Order-independent hash: sub-descriptor hashes are partial sums.
  hashes_.clear();
  for (std::uint32_t i = 0; i < s.size(); ++i) {
    if (s[i].size() >= hi) continue;
    std::uint64_t h = 0;
    for (const auto& a : s[i]) h += assignment_hash(a);
    hashes_.emplace_back(h, i);
  }
  std::sort(hashes_.begin(), hashes_.end());

  auto present = [&](std::uint64_t h, const WsDescriptor& d, std::size_t k) {
    auto it = std::lower_bound(hashes_.begin(), hashes_.end(), std::make_pair(h, std::uint32_t{0}));
    for (; it != hashes_.end() && it->first == h; ++it) {
      const auto& c = s[it->second];
      if (c.size() == k && contains(d, c)) return true;
    }
    return false;
  };

  std::uint64_t hs[kFullProbe];
  std::vector<bool> drop(s.size(), false);
  bool any = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto& d = s[i];
    const std::size_t k = d.size();
    if (k <= lo) continue;
    bool hit = false;
    if (k <= kFullProbe) {
      for (std::size_t j = 0; j < k; ++j) hs[j] = assignment_hash(d[j]);
      const std::uint32_t full = (1u << k) - 1;
      for (std::uint32_t mask = 1; mask < full && !hit; ++mask) {
        const auto bits = static_cast<std::size_t>(std::popcount(mask));
        if (bits < lo) continue;
        std::uint64_t h = 0;
        for (std::size_t j = 0; j < k; ++j)
          if (mask >> j & 1u) h += hs[j];
        hit = present(h, d, bits);
      }
    } else if (lo == 1) {
      for (std::size_t j = 0; j < k && !hit; ++j) hit = present(assignment_hash(d[j]), d, 1);
    }
    if (hit) drop[i] = any = true;
  }
  if (!any) return std::nullopt;
  DescList out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!drop[i]) out.push_back(s[i]);
  }
  return out;
}

Splitter::Counts Splitter::count(const DescList& s, VarId x) const {
  Counts c;
  c.per_value.assign(w_->domain_size(x), 0);
  for (const auto& d : s) {
    if (auto v = d.value_of(x)) {
      ++c.per_value[*v];
      ++c.total;
    }
  }
  return c;
}

double log2_sum_exp2(const std::vector<double>& terms) {
  double e = -std::numeric_limits<double>::infinity();
  for (double t : terms) {
    if (std::isinf(e)) {
      e = t;
    } else {
      const double hi = std::max(e, t);
      const double lo = std::min(e, t);
      e = hi + std::log2(1.0 + std::exp2(lo - hi));
    }
  }
  return e;
}

double minlog_cost(std::span<const std::size_t> per_value, std::size_t rest) {
  bool missing = false;
  std::vector<double> terms;
  for (auto c : per_value) {
    if (c > 0) terms.push_back(static_cast<double>(c + rest));
    else missing = true;
  }
  if (missing) terms.insert(terms.begin(), static_cast<double>(rest));
  return log2_sum_exp2(terms);
}

std::size_t minmax_cost(std::span<const std::size_t> per_value, std::size_t rest) {
  std::size_t m = 0;
  for (auto c : per_value) {
    if (c > 0) m = std::max(m, c + rest);
  }
  return m;
}

VarId Splitter::choose(const DescList& s, Heuristic h) {
  if (++epoch_ == 0) {
    std::fill(stamp_.begin(), stamp_.end(), 0);
    epoch_ = 1;
  }
  std::vector<VarId> touched;
  for (const auto& d : s) {
    for (const auto& a : d) {
      if (stamp_[a.var] != epoch_) {
        stamp_[a.var] = epoch_;
        touched.push_back(a.var);
        totals_[a.var] = 0;
        std::fill(counts_.begin() + static_cast<std::ptrdiff_t>(offset_[a.var]),
                  counts_.begin() + static_cast<std::ptrdiff_t>(offset_[a.var + 1]), 0);
      }
      ++totals_[a.var];
      ++counts_[offset_[a.var] + a.value];
    }
  }
  std::sort(touched.begin(), touched.end());
  VarId best = touched.front();
  double best_log = std::numeric_limits<double>::infinity();
  std::size_t best_max = std::numeric_limits<std::size_t>::max();
  for (VarId x : touched) {
    const std::span<const std::size_t> per_value(counts_.data() + offset_[x],
                                                 offset_[x + 1] - offset_[x]);
    const std::size_t rest = s.size() - totals_[x];
    if (h == Heuristic::MinLog) {
      const double e = minlog_cost(per_value, rest);
      if (e < best_log) {
        best_log = e;
        best = x;
      }
    } else {
      const std::size_t m = minmax_cost(per_value, rest);
      if (m < best_max) {
        best_max = m;
        best = x;
      }
    }
  }
  return best;
}

Split Splitter::eliminate(const DescList& s, VarId x) const {
  Split out;
  out.var = x;
  out.stripped.resize(w_->domain_size(x));
  for (const auto& d : s) {
    if (auto v = d.value_of(x)) {
      out.stripped[*v].push_back(d.without(x));
    } else {
      out.rest.push_back(d);
    }
  }
  return out;
}

DescList Splitter::child(const DescList& stripped, const DescList& rest) {
  DescList sorted = stripped;
  std::sort(sorted.begin(), sorted.end());
  DescList out;
  out.reserve(sorted.size() + rest.size());
  std::set_union(sorted.begin(), sorted.end(), rest.begin(), rest.end(),
                 std::back_inserter(out));
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace wscond::detail
