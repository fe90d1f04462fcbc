#pragma once

// Reference semantics by exhaustive enumeration of total valuations. Uses only
// the raw accessors of the world table and descriptors, none of the engines.

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "wscond/descriptor.hpp"
#include "wscond/urelation.hpp"
#include "wscond/world_table.hpp"

namespace oracle {

using wscond::Tuple;
using wscond::ValueIdx;
using wscond::VarId;
using wscond::WorldTable;
using wscond::WsDescriptor;
using wscond::WsSet;

using Valuation = std::vector<ValueIdx>;

// Calls f(valuation, probability) for every total valuation of w.
inline void for_each_world(const WorldTable& w,
                           const std::function<void(const Valuation&, double)>& f) {
  Valuation val(w.size(), 0);
  std::function<void(std::size_t, double)> rec = [&](std::size_t v, double p) {
    if (v == w.size()) {
      f(val, p);
      return;
    }
    for (ValueIdx i = 0; i < w.domain_size(static_cast<VarId>(v)); ++i) {
      val[v] = i;
      rec(v + 1, p * w.prob(static_cast<VarId>(v), i));
    }
  };
  rec(0, 1.0);
}

inline bool covers(const WsDescriptor& d, const Valuation& val) {
  for (const auto& a : d.assignments()) {
    if (val[a.var] != a.value) return false;
  }
  return true;
}

inline bool covers(const WsSet& s, const Valuation& val) {
  for (const auto& d : s) {
    if (covers(d, val)) return true;
  }
  return false;
}

// Σ over valuations of the variables s mentions (the others sum out to 1),
// accumulated with Kahan-Babuska compensation.
inline double probability(const WsSet& s, const WorldTable& w) {
  std::vector<VarId> vars;
  std::vector<bool> seen(w.size(), false);
  for (const auto& d : s)
    for (const auto& a : d.assignments())
      if (!seen[a.var]) {
        seen[a.var] = true;
        vars.push_back(a.var);
      }
  Valuation val(w.size(), 0);
  double sum = 0.0, comp = 0.0;
  while (true) {
    if (covers(s, val)) {
      double q = 1.0;
      for (VarId v : vars) q *= w.prob(v, val[v]);
      double t = sum + q;
      comp += std::abs(sum) >= std::abs(q) ? (sum - t) + q : (q - t) + sum;
      sum = t;
    }
    std::size_t k = 0;
    for (; k < vars.size(); ++k) {
      if (++val[vars[k]] < w.domain_size(vars[k])) break;
      val[vars[k]] = 0;
    }
    if (k == vars.size()) break;
  }
  return sum + comp;
}

inline double probability(const WsDescriptor& d, const WorldTable& w) {
  return probability(WsSet{d}, w);
}

// The set of (indices of) worlds in ω(s), in enumeration order.
inline std::vector<bool> omega(const WsSet& s, const WorldTable& w) {
  std::vector<bool> out;
  for_each_world(w, [&](const Valuation& val, double) { out.push_back(covers(s, val)); });
  return out;
}

inline bool same_worlds(const WsSet& a, const WsSet& b, const WorldTable& w) {
  return omega(a, w) == omega(b, w);
}

inline bool pairwise_disjoint(const WsSet& s, const WorldTable& w) {
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = i + 1; j < s.size(); ++j) {
      bool overlap = false;
      for_each_world(w, [&](const Valuation& val, double) {
        if (covers(s[i], val) && covers(s[j], val)) overlap = true;
      });
      if (overlap) return false;
    }
  return true;
}

// A possible world as data: relation name → set of tuples.
// Kahan-Babuska running sum.
struct Sum {
  double sum = 0.0, comp = 0.0;
  void add(double q) {
    double t = sum + q;
    comp += std::abs(sum) >= std::abs(q) ? (sum - t) + q : (q - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

using Instance = std::map<std::string, std::set<Tuple>>;
// Probability mass per distinct instance.
using Distribution = std::map<Instance, double>;

inline Instance instance_of(const wscond::ProbabilisticDatabase& db, const Valuation& val) {
  Instance inst;
  for (const auto& [name, rel] : db.relations) {
    auto& tuples = inst[name];
    for (const auto& row : rel.rows()) {
      if (covers(row.wsd, val)) tuples.insert(row.values);
    }
  }
  return inst;
}

// Calls f(valuation, probability) for every valuation of `vars` (the other
// entries stay 0 and their variables sum out).
inline void for_each_partial(const WorldTable& w, const std::vector<VarId>& vars,
                             const std::function<void(const Valuation&, double)>& f) {
  Valuation val(w.size(), 0);
  while (true) {
    double p = 1.0;
    for (VarId v : vars) p *= w.prob(v, val[v]);
    f(val, p);
    std::size_t k = 0;
    for (; k < vars.size(); ++k) {
      if (++val[vars[k]] < w.domain_size(vars[k])) break;
      val[vars[k]] = 0;
    }
    if (k == vars.size()) return;
  }
}

inline std::vector<VarId> mentioned(const wscond::ProbabilisticDatabase& db,
                                    const std::vector<const WsSet*>& extra = {}) {
  std::set<VarId> vs;
  for (const auto& [name, rel] : db.relations)
    for (const auto& row : rel.rows())
      for (const auto& a : row.wsd.assignments()) vs.insert(a.var);
  for (const WsSet* s : extra)
    for (const auto& d : *s)
      for (const auto& a : d.assignments()) vs.insert(a.var);
  return {vs.begin(), vs.end()};
}

constexpr ValueIdx kUnset = std::numeric_limits<ValueIdx>::max();

// 1 if d holds under the partial valuation, 0 if it fails, -1 if undecided.
inline int decided(const WsDescriptor& d, const Valuation& val) {
  bool all = true;
  for (const auto& a : d.assignments()) {
    if (val[a.var] == kUnset) all = false;
    else if (val[a.var] != a.value) return 0;
  }
  return all ? 1 : -1;
}

// Enumeration with early stopping: branches on `vars` in order, skipping
// variables no undecided descriptor mentions, and calls f(partial valuation,
// mass) once every descriptor of `ds` is decided. Unassigned entries are
// kUnset; their variables sum out to 1. Throws past `max_leaves` leaves.
inline void for_each_decided(const WorldTable& w, const std::vector<VarId>& vars,
                             const std::vector<const WsDescriptor*>& ds,
                             const std::function<void(const Valuation&, double)>& f,
                             std::size_t max_leaves = std::size_t{1} << 24) {
  Valuation val(w.size(), kUnset);
  std::size_t leaves = 0;
  std::function<void(std::size_t, double)> rec = [&](std::size_t k, double p) {
    std::vector<bool> needed(w.size(), false);
    bool open = false;
    for (const auto* d : ds) {
      if (decided(*d, val) != -1) continue;
      open = true;
      for (const auto& a : d->assignments()) needed[a.var] = true;
    }
    if (!open) {
      if (++leaves > max_leaves) throw std::length_error("oracle enumeration too large");
      f(val, p);
      return;
    }
    while (!needed[vars[k]]) ++k;
    const VarId v = vars[k];
    for (ValueIdx i = 0; i < w.domain_size(v); ++i) {
      val[v] = i;
      rec(k + 1, p * w.prob(v, i));
    }
    val[v] = kUnset;
  };
  rec(0, 1.0);
}

inline std::vector<const WsDescriptor*> row_descriptors(const wscond::ProbabilisticDatabase& db) {
  std::vector<const WsDescriptor*> out;
  for (const auto& [name, rel] : db.relations)
    for (const auto& row : rel.rows()) out.push_back(&row.wsd);
  return out;
}

// Restricting to `relations` when nonempty.
inline Distribution distribution(const wscond::ProbabilisticDatabase& db,
                                 const std::set<std::string>& relations = {}) {
  std::map<Instance, Sum> acc;
  for_each_decided(db.world, mentioned(db), row_descriptors(db),
                   [&](const Valuation& val, double p) {
                     auto inst = instance_of(db, val);
                     if (!relations.empty()) {
                       std::erase_if(inst,
                                     [&](const auto& kv) { return !relations.count(kv.first); });
                     }
                     acc[inst].add(p);
                   });
  Distribution out;
  for (const auto& [inst, t] : acc) out.emplace(inst, t.value());
  std::erase_if(out, [](const auto& kv) { return kv.second == 0.0; });
  return out;
}

// The distribution conditioned on ω(evidence) (over db.world), renormalized.
inline Distribution conditioned(const wscond::ProbabilisticDatabase& db, const WsSet& evidence,
                                double* confidence = nullptr) {
  auto ds = row_descriptors(db);
  for (const auto& d : evidence) ds.push_back(&d);
  std::map<Instance, Sum> acc;
  Sum total;
  for_each_decided(db.world, mentioned(db, {&evidence}), ds, [&](const Valuation& val, double p) {
    if (!covers(evidence, val)) return;
    acc[instance_of(db, val)].add(p);
    total.add(p);
  });
  const double c = total.value();
  Distribution out;
  for (const auto& [inst, t] : acc) out.emplace(inst, t.value() / c);
  std::erase_if(out, [](const auto& kv) { return kv.second == 0.0; });
  if (confidence) *confidence = c;
  return out;
}

// Largest relative weight difference over the union of supports; a world
// present on one side only counts as 1.
inline double distance(const Distribution& a, const Distribution& b) {
  auto rel = [](double p, double q) {
    double m = std::max(std::abs(p), std::abs(q));
    return m == 0.0 ? 0.0 : std::abs(p - q) / m;
  };
  double worst = 0.0;
  for (const auto& [inst, p] : a) {
    auto it = b.find(inst);
    worst = std::max(worst, rel(p, it == b.end() ? 0.0 : it->second));
  }
  for (const auto& [inst, p] : b) {
    if (!a.count(inst)) worst = std::max(worst, rel(p, 0.0));
  }
  return worst;
}

inline double total(const Distribution& d) {
  Sum t;
  for (const auto& [inst, p] : d) t.add(p);
  return t.value();
}

}  // namespace oracle
