#include "wscond/conditioning.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "splitter.hpp"
#include "wscond/errors.hpp"

namespace wscond {

std::string source_name(std::string_view fresh_name) {
  return std::string(fresh_name.substr(0, fresh_name.find('\'')));
}

WsSet ConditioningResult::rewritten_set() const {
  std::vector<WsDescriptor> out;
  out.reserve(rewritten.size());
  for (const auto& t : rewritten) out.push_back(t.wsd);
  return WsSet(std::move(out));
}

namespace {

using Tagged = std::vector<TaggedDescriptor>;

// What the conditioning recursion sees of an evidence node.
template <typename Node>
struct Shape {
  WsTree::Kind kind = WsTree::Kind::Bottom;
  std::vector<Node> children;                // Times
  VarId var = 0;                             // Plus
  std::vector<std::optional<Node>> by_value;  // Plus; nullopt is ⊥
};

std::vector<VarId> sorted_unique(std::vector<VarId> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

// Evidence given as a materialized ws-tree.
class TreeSource {
 public:
  using Node = WsTree;

  explicit TreeSource(const WorldTable& w) : w_(w) {}

  Shape<Node> expand(const WsTree& r) const {
    Shape<Node> s;
    s.kind = r.kind();
    if (s.kind == WsTree::Kind::Times) {
      s.children.assign(r.children().begin(), r.children().end());
    } else if (s.kind == WsTree::Kind::Plus) {
      s.var = r.variable();
      s.by_value.resize(w_.domain_size(s.var));
      for (const auto& b : r.branches()) s.by_value[b.value] = b.child;
    }
    return s;
  }

  std::vector<VarId> variables(const WsTree& r) const {
    std::vector<VarId> out;
    collect(r, out);
    return sorted_unique(std::move(out));
  }

  double probability(const WsTree& r) const { return tree_probability(r, w_); }

 private:
  static void collect(const WsTree& r, std::vector<VarId>& out) {
    if (r.kind() == WsTree::Kind::Plus) out.push_back(r.variable());
    for (const auto& c : r.children()) collect(c, out);
    for (const auto& b : r.branches()) collect(b.child, out);
  }

  const WorldTable& w_;
};

// Evidence given as a ws-set, decomposed on the fly.
class SetSource {
 public:
  using Node = std::shared_ptr<const detail::DescList>;

  SetSource(const WorldTable& w, const DecomposeOptions& opts, Budget& budget)
      : w_(w), opts_(opts), budget_(budget), splitter_(w) {}

  Shape<Node> expand(const Node& n) {
    Shape<Node> s;
    if (n->empty()) return s;
    if (n->front().empty()) {
      s.kind = WsTree::Kind::Top;
      return s;
    }
    const auto reduced = splitter_.without_subsumed(*n);
    const auto& list = reduced ? *reduced : *n;
    if (opts_.partitioning) {
      auto parts = splitter_.partition(list);
      if (parts.size() > 1) {
        s.kind = WsTree::Kind::Times;
        for (auto& p : parts) s.children.push_back(std::make_shared<const detail::DescList>(std::move(p)));
        return s;
      }
    }
    s.kind = WsTree::Kind::Plus;
    s.var = splitter_.choose(list, opts_.heuristic);
    auto split = splitter_.eliminate(list, s.var);
    auto rest = std::make_shared<const detail::DescList>(std::move(split.rest));
    for (auto& stripped : split.stripped) {
      if (stripped.empty()) {
        s.by_value.emplace_back(rest);
      } else {
        s.by_value.emplace_back(
            std::make_shared<const detail::DescList>(detail::Splitter::child(stripped, *rest)));
      }
    }
    return s;
  }

  std::vector<VarId> variables(const Node& n) const {
    std::vector<VarId> out;
    for (const auto& d : *n)
      for (const auto& a : d) out.push_back(a.var);
    return sorted_unique(std::move(out));
  }

  double probability(const Node& n) const {
    return detail::probability(*n, w_, opts_, budget_);
  }

 private:
  const WorldTable& w_;
  const DecomposeOptions& opts_;
  Budget& budget_;
  detail::Splitter splitter_;
};

struct Out {
  double c = 0.0;
  Tagged u;
};

Tagged concat(Tagged a, Tagged b) {
  if (a.empty()) return b;
  a.insert(a.end(), std::make_move_iterator(b.begin()), std::make_move_iterator(b.end()));
  return a;
}

template <typename Source>
class Conditioner {
 public:
  using Node = typename Source::Node;

  Conditioner(Source& src, WorldTable& world, ProductRule rule, Budget& budget)
      : src_(src), world_(world), rule_(rule), budget_(budget) {}

  // Conditions u on ω(n) (negated: on its complement).
  Out run(const Node& n, Tagged u, bool negated) {
    budget_.tick();
    Tagged through;
    if (rule_ == ProductRule::Exact && !u.empty()) {
      const auto vars = src_.variables(n);
      Tagged touching;
      for (auto& t : u) {
        const bool hit = std::any_of(t.wsd.begin(), t.wsd.end(), [&](const Assignment& a) {
          return std::binary_search(vars.begin(), vars.end(), a.var);
        });
        (hit ? touching : through).push_back(std::move(t));
      }
      u = std::move(touching);
    }
    Out out;
    if (u.empty()) {
      const double p = src_.probability(n);
      out.c = negated ? 1.0 - p : p;
    } else {
      out = visit(src_.expand(n), std::move(u), negated);
    }
    if (out.c <= 0.0) return {};
    out.u = concat(std::move(out.u), std::move(through));
    return out;
  }

 private:
  Out leaf(bool top, Tagged u, bool negated) {
    if (top != negated) return {1.0, std::move(u)};
    return {};
  }

  Out visit(Shape<Node> s, Tagged u, bool negated) {
    switch (s.kind) {
      case WsTree::Kind::Top: return leaf(true, std::move(u), negated);
      case WsTree::Kind::Bottom: return leaf(false, std::move(u), negated);
      case WsTree::Kind::Times:
        if (negated) return all_negated(s.children, std::move(u));
        if (rule_ == ProductRule::AsPublished) return union_as_published(s.children, std::move(u));
        return union_exact(s.children, 0, std::move(u));
      case WsTree::Kind::Plus: return branch(s, std::move(u), negated);
    }
    return {};
  }

  Out union_as_published(const std::vector<Node>& children, const Tagged& u) {
    double q = 1.0;
    Tagged all;
    for (const auto& child : children) {
      auto r = run(child, u, false);
      q *= 1.0 - r.c;
      all = concat(std::move(all), std::move(r.u));
    }
    return {1.0 - q, std::move(all)};
  }

  // C_j ∨ C_{j+1} ∨ ... as C_j ⊕ (¬C_j ∧ (C_{j+1} ∨ ...)).
  Out union_exact(const std::vector<Node>& children, std::size_t j, Tagged u) {
    if (j + 1 == children.size()) return run(children[j], std::move(u), false);
    auto first = run(children[j], u, false);
    auto others = run(children[j], std::move(u), true);
    double c_others = 0.0;
    if (others.c > 0.0) {
      auto tail = union_exact(children, j + 1, std::move(others.u));
      c_others = others.c * tail.c;
      others.u = std::move(tail.u);
    }
    const double c = first.c + c_others;
    if (c <= 0.0) return {};
    if (c_others <= 0.0) return {c, std::move(first.u)};
    if (first.c <= 0.0) return {c, std::move(others.u)};
    const VarId s = fresh("sel", {"1", "2"}, {first.c / c, c_others / c});
    for (auto& t : first.u) t.wsd = t.wsd.with(s, 0);
    for (auto& t : others.u) t.wsd = t.wsd.with(s, 1);
    return {c, concat(std::move(first.u), std::move(others.u))};
  }

  // ¬C_1 ∧ ¬C_2 ∧ ...: the children are independent, so condition in sequence.
  Out all_negated(const std::vector<Node>& children, Tagged u) {
    Out acc{1.0, std::move(u)};
    for (const auto& child : children) {
      auto r = run(child, std::move(acc.u), true);
      acc.c *= r.c;
      if (acc.c <= 0.0) return {};
      acc.u = std::move(r.u);
    }
    return acc;
  }

  Out branch(const Shape<Node>& s, const Tagged& u, bool negated) {
    const VarId x = s.var;
    const std::size_t dom = s.by_value.size();
    std::vector<Out> results(dom);
    double c = 0.0;
    for (ValueIdx i = 0; i < dom; ++i) {
      Tagged ui;
      for (const auto& t : u) {
        const auto v = t.wsd.value_of(x);
        if (!v || *v == i) ui.push_back(t);
      }
      if (s.by_value[i]) {
        results[i] = run(*s.by_value[i], std::move(ui), negated);
      } else {
        results[i] = leaf(false, std::move(ui), negated);
      }
      c += world_.prob(x, i) * results[i].c;
    }
    if (c <= 0.0) return {};

    std::vector<ValueIdx> kept;
    for (ValueIdx i = 0; i < dom; ++i) {
      if (results[i].c != 0.0) kept.push_back(i);
    }
    Tagged out;
    if (kept.size() == 1 && rule_ == ProductRule::Exact) {
      // x' would be certain.
      for (auto& t : results[kept[0]].u) out.push_back({t.tag, t.wsd.without(x)});
      return {c, std::move(out)};
    }
    std::vector<std::string> labels;
    std::vector<double> probs;
    for (ValueIdx i : kept) {
      labels.push_back(world_.label(x, i));
      probs.push_back(world_.prob(x, i) * results[i].c / c);
    }
    const VarId xp = fresh(source_name(world_.name(x)), std::move(labels), std::move(probs));
    for (ValueIdx k = 0; k < kept.size(); ++k) {
      for (auto& t : results[kept[k]].u) out.push_back({t.tag, t.wsd.without(x).with(xp, k)});
    }
    return {c, std::move(out)};
  }

  VarId fresh(const std::string& source, std::vector<std::string> labels,
              std::vector<double> probs) {
    double sum = 0.0;
    for (double p : probs) sum += p;
    for (double& p : probs) p /= sum;
    std::string name;
    do {
      name = source + "'" + std::to_string(++counter_);
    } while (world_.find(name));
    return world_.add_variable(std::move(name), std::move(labels), std::move(probs));
  }

  Source& src_;
  WorldTable& world_;
  ProductRule rule_;
  Budget& budget_;
  std::uint64_t counter_ = 0;
};

void finish(ConditioningResult& r, Out out) {
  r.confidence = out.c;
  std::sort(out.u.begin(), out.u.end());
  out.u.erase(std::unique(out.u.begin(), out.u.end()), out.u.end());
  r.rewritten = std::move(out.u);
}

void validate_tagged(std::span<const TaggedDescriptor> u, const WorldTable& w) {
  for (const auto& t : u) validate(t.wsd, w);
}

}  // namespace

ConditioningResult cond(const WsTree& r, std::span<const TaggedDescriptor> u,
                        const WorldTable& w, ProductRule rule) {
  if (auto why = check_tree(r, w); !why.empty()) throw ValidationError("invalid ws-tree: " + why);
  validate_tagged(u, w);
  ConditioningResult result;
  result.world = w;
  result.first_fresh = static_cast<VarId>(w.size());
  Budget budget(kDefaultNodeCap);
  TreeSource src(w);
  Conditioner<TreeSource> c(src, result.world, rule, budget);
  finish(result, c.run(r, Tagged(u.begin(), u.end()), false));
  result.nodes = budget.nodes();
  return result;
}

ConditioningResult cond(const WsTree& r, const WsSet& u, const WorldTable& w, ProductRule rule) {
  Tagged tagged;
  for (std::size_t i = 0; i < u.size(); ++i) tagged.push_back({i, u[i]});
  return cond(r, tagged, w, rule);
}

ConditioningResult cond_fused(const WsSet& evidence, std::span<const TaggedDescriptor> u,
                              const WorldTable& w, const ConditionOptions& opts) {
  validate(evidence, w);
  validate_tagged(u, w);
  ConditioningResult result;
  result.world = w;
  result.first_fresh = static_cast<VarId>(w.size());
  Budget budget(opts.decompose.max_nodes, opts.decompose.deadline);
  SetSource src(w, opts.decompose, budget);
  Conditioner<SetSource> c(src, result.world, opts.rule, budget);
  auto root = std::make_shared<const detail::DescList>(evidence.begin(), evidence.end());
  finish(result, c.run(root, Tagged(u.begin(), u.end()), false));
  result.nodes = budget.nodes();
  return result;
}

ConditionedDatabase condition_database(const ProbabilisticDatabase& db, const WsSet& evidence,
                                       const ConditionOptions& opts) {
  db.validate();
  const WsSet s = normalize(evidence, db.world);
  validate(s, db.world);

  struct Origin {
    const std::string* relation;
    const Row* row;
  };
  std::vector<Origin> origins;
  Tagged u;
  for (const auto& [name, rel] : db.relations) {
    for (const auto& row : rel.rows()) {
      u.push_back({origins.size(), normalize(row.wsd, db.world)});
      origins.push_back({&name, &row});
    }
  }

  auto r = cond_fused(s, u, db.world, opts);
  if (!(r.confidence > 0.0)) throw UnsatisfiableEvidence();

  ConditionedDatabase out;
  out.confidence = r.confidence;
  out.db.world = std::move(r.world);
  for (const auto& [name, rel] : db.relations) out.db.relations.emplace(name, URelation(rel.schema()));
  for (auto& t : r.rewritten) {
    const auto& o = origins[t.tag];
    out.db.relations.at(*o.relation).add(std::move(t.wsd), o.row->values);
  }
  for (auto& [name, rel] : out.db.relations) rel.canonicalize();
  return out;
}

ProbabilisticDatabase assert_evidence(const ProbabilisticDatabase& db, const WsSet& evidence,
                                      const ConditionOptions& opts) {
  return condition_database(db, evidence, opts).db;
}

// ---------------------------------------------------------------------------
// simplify

namespace {

// Keeps the variables with keep[v] set; `rename[v]` redirects v's assignments
// to another kept variable (same value index).
ProbabilisticDatabase rebuild(const ProbabilisticDatabase& db, const std::vector<bool>& keep,
                              const std::vector<VarId>& rename) {
  const WorldTable& w = db.world;
  std::vector<VarId> id(w.size(), 0);
  ProbabilisticDatabase out;
  for (VarId v = 0; v < w.size(); ++v) {
    if (!keep[v]) continue;
    const auto& var = w.variable(v);
    id[v] = out.world.add_variable(var.name, var.labels, var.probs);
  }
  for (const auto& [name, rel] : db.relations) {
    URelation r(rel.schema());
    for (const auto& row : rel.rows()) {
      std::vector<Assignment> as;
      for (const auto& a : row.wsd) {
        const VarId target = rename[a.var];
        if (keep[target]) as.push_back({id[target], a.value});
      }
      r.add(WsDescriptor(std::move(as)), row.values);
    }
    r.canonicalize();
    out.relations.emplace(name, std::move(r));
  }
  return out;
}

bool pairwise_mutex(const std::vector<const WsDescriptor*>& a,
                    const std::vector<const WsDescriptor*>& b) {
  for (const auto* d1 : a)
    for (const auto* d2 : b)
      if (!is_mutex(*d1, *d2)) return false;
  return true;
}

// One round; returns false when nothing changed.
bool simplify_once(ProbabilisticDatabase& db) {
  const WorldTable& w = db.world;
  const std::size_t n = w.size();
  std::vector<std::vector<const WsDescriptor*>> uses(n);
  for (const auto& [name, rel] : db.relations)
    for (const auto& row : rel.rows())
      for (const auto& a : row.wsd) uses[a.var].push_back(&row.wsd);

  std::vector<bool> keep(n, true);
  std::vector<VarId> rename(n);
  bool changed = false;
  for (VarId v = 0; v < n; ++v) {
    rename[v] = v;
    if (uses[v].empty() || w.domain_size(v) == 1) {
      keep[v] = false;
      changed = true;
    }
  }
  if (!changed) {
    std::map<std::string, std::vector<VarId>> copies;
    for (VarId v = 0; v < n; ++v) {
      if (w.name(v).find('\'') != std::string::npos) copies[source_name(w.name(v))].push_back(v);
    }
    // Greedy classes per source: a copy joins the first class with the same
    // alternatives whose uses are all mutex with its own. A passing test means
    // no descriptor mentions two of these copies, so renaming within a class
    // cannot change a later test; one rebuild per round suffices.
    for (const auto& [source, vars] : copies) {
      std::vector<std::vector<VarId>> classes;
      for (const VarId b : vars) {
        bool joined = false;
        for (auto& cls : classes) {
          const VarId a = cls.front();
          if (w.variable(a).labels != w.variable(b).labels ||
              w.variable(a).probs != w.variable(b).probs) {
            continue;
          }
          bool ok = true;
          for (const VarId m : cls) {
            if (!pairwise_mutex(uses[m], uses[b])) {
              ok = false;
              break;
            }
          }
          if (!ok) continue;
          cls.push_back(b);
          rename[b] = a;
          keep[b] = false;
          changed = true;
          joined = true;
          break;
        }
        if (!joined) classes.push_back({b});
      }
    }
    if (!changed) return false;
  }
  db = rebuild(db, keep, rename);
  return true;
}

}  // namespace

ProbabilisticDatabase simplify(const ProbabilisticDatabase& db) {
  db.validate();
  ProbabilisticDatabase out = db;
  while (simplify_once(out)) {
  }
  return out;
}

}  // namespace wscond
