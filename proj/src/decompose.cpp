#include "wscond/decompose.hpp"

#include <algorithm>
#include <atomic>
#include <future>
#include <set>
#include <sstream>

#include "splitter.hpp"
#include "wscond/errors.hpp"
#include "wscond/io.hpp"

namespace wscond {

void Budget::tick() {
  const auto n = nodes_.fetch_add(1, std::memory_order_relaxed) + 1;
  if (n > max_nodes_) {
    throw ResourceError("instance too hard: more than " + std::to_string(max_nodes_) +
                        " subproblems");
  }
  if (deadline_ && (n & 0xff) == 0 && Clock::now() > *deadline_) {
    throw DeadlineExceeded();
  }
}

// ---------------------------------------------------------------------------
// WsTree

struct WsTree::Node {
  Kind kind;
  VarId var = 0;
  std::vector<WsTree> children;
  std::vector<WsBranch> branches;
};

WsTree WsTree::top() {
  static const auto node = std::make_shared<const Node>(Node{Kind::Top, 0, {}, {}});
  return WsTree(node);
}

WsTree WsTree::bottom() {
  static const auto node = std::make_shared<const Node>(Node{Kind::Bottom, 0, {}, {}});
  return WsTree(node);
}

WsTree WsTree::times(std::vector<WsTree> children) {
  return WsTree(std::make_shared<const Node>(Node{Kind::Times, 0, std::move(children), {}}));
}

WsTree WsTree::plus(VarId var, std::vector<WsBranch> branches) {
  return WsTree(std::make_shared<const Node>(Node{Kind::Plus, var, {}, std::move(branches)}));
}

WsTree::Kind WsTree::kind() const { return node_->kind; }
std::span<const WsTree> WsTree::children() const { return node_->children; }
VarId WsTree::variable() const { return node_->var; }
std::span<const WsBranch> WsTree::branches() const { return node_->branches; }

// ---------------------------------------------------------------------------
// Public split helpers over WsSet

namespace {

detail::DescList to_list(const WsSet& s) {
  return detail::DescList(s.begin(), s.end());
}

}  // namespace

std::vector<WsSet> independent_partition(const WsSet& s) {
  if (s.empty()) return {};
  if (s.has_universal()) return {s};
  VarId max_var = 0;
  for (const auto& d : s) max_var = std::max(max_var, d.assignments().back().var);
  detail::Splitter splitter(static_cast<std::size_t>(max_var) + 1);
  std::vector<WsSet> out;
  for (auto& part : splitter.partition(to_list(s))) out.emplace_back(std::move(part));
  return out;
}

Elimination eliminate_variable(const WsSet& s, VarId x, const WorldTable& w) {
  validate(s, w);
  if (!w.contains(x)) throw ValidationError("unknown variable id " + std::to_string(x));
  detail::Splitter sp(w);
  auto split = sp.eliminate(to_list(s), x);
  if (split.rest.size() == s.size()) {
    throw ValidationError("variable '" + w.name(x) + "' does not occur in the ws-set");
  }
  Elimination out;
  out.rest = WsSet(std::move(split.rest));
  for (auto& part : split.stripped) out.by_value.emplace_back(std::move(part));
  return out;
}

namespace {

detail::Splitter::Counts counts_for(const WsSet& s, VarId x, const WorldTable& w) {
  validate(s, w);
  detail::Splitter sp(w);
  auto c = sp.count(to_list(s), x);
  if (c.total == 0) {
    throw ValidationError("variable '" + w.name(x) + "' does not occur in the ws-set");
  }
  return c;
}

}  // namespace

double estimate_minlog(const WsSet& s, VarId x, const WorldTable& w) {
  auto c = counts_for(s, x, w);
  return detail::minlog_cost(c.per_value, s.size() - c.total);
}

std::size_t estimate_minmax(const WsSet& s, VarId x, const WorldTable& w) {
  auto c = counts_for(s, x, w);
  return detail::minmax_cost(c.per_value, s.size() - c.total);
}

VarId choose_variable(const WsSet& s, const WorldTable& w, Heuristic h) {
  validate(s, w);
  if (s.empty() || (s.size() == 1 && s.has_universal())) {
    throw ValidationError("ws-set mentions no variable");
  }
  detail::Splitter sp(w);
  auto list = to_list(s);
  return sp.choose(list, h);
}

// ---------------------------------------------------------------------------
// The translation recursion, parameterised by what it builds.

namespace {

struct ProbabilityAlgebra {
  using Result = double;
  const WorldTable& w;
  Result bottom() const { return 0.0; }
  Result top() const { return 1.0; }
  Result product(const std::vector<Result>& parts) const {
    double q = 1.0;
    for (double p : parts) q *= 1.0 - p;
    return 1.0 - q;
  }
  Result sum(VarId x, const std::vector<std::pair<ValueIdx, Result>>& branches) const {
    double acc = 0.0;
    for (const auto& [i, p] : branches) acc += w.prob(x, i) * p;
    return acc;
  }
};

struct TreeAlgebra {
  using Result = WsTree;
  Result bottom() const { return WsTree::bottom(); }
  Result top() const { return WsTree::top(); }
  Result product(const std::vector<Result>& parts) const { return WsTree::times(parts); }
  Result sum(VarId x, const std::vector<std::pair<ValueIdx, Result>>& branches) const {
    std::vector<WsBranch> out;
    for (const auto& [i, child] : branches) {
      if (child.kind() != WsTree::Kind::Bottom) out.push_back(WsBranch{i, child});
    }
    if (out.empty()) return WsTree::bottom();
    return WsTree::plus(x, std::move(out));
  }
};

template <typename Algebra>
class Translator {
 public:
  using Result = typename Algebra::Result;

  Translator(const WorldTable& w, const DecomposeOptions& opts, Algebra alg, Budget& budget,
             std::atomic<int>& spare_threads)
      : w_(w), opts_(opts), alg_(alg), budget_(budget), spare_threads_(spare_threads),
        splitter_(w) {}

  Result solve(const detail::DescList& input) {
    budget_.tick();
    if (input.empty()) return alg_.bottom();
    if (input.front().empty()) return alg_.top();
    const auto reduced = splitter_.without_subsumed(input);
    const auto& s = reduced ? *reduced : input;

    if (opts_.partitioning) {
      auto parts = splitter_.partition(s);
      if (parts.size() > 1) return solve_components(parts);
    }

    const VarId x = splitter_.choose(s, opts_.heuristic);
    auto split = splitter_.eliminate(s, x);
    std::vector<std::pair<ValueIdx, Result>> branches;
    std::optional<Result> rest_result;
    for (ValueIdx i = 0; i < split.stripped.size(); ++i) {
      if (!split.stripped[i].empty()) {
        branches.emplace_back(i, solve(detail::Splitter::child(split.stripped[i], split.rest)));
      } else {
        // Values absent from s all lead to T, translated once.
        if (!rest_result) rest_result = solve(split.rest);
        branches.emplace_back(i, *rest_result);
      }
    }
    return alg_.sum(x, branches);
  }

 private:
  Result solve_components(const std::vector<detail::DescList>& parts) {
    std::vector<std::optional<Result>> results(parts.size());
    std::vector<std::pair<std::size_t, std::future<Result>>> pending;
    for (std::size_t k = 0; k < parts.size(); ++k) {
      if (k > 0 && take_thread()) {
        pending.emplace_back(k, std::async(std::launch::async, [this, &parts, k] {
          Translator sub(w_, opts_, alg_, budget_, spare_threads_);
          auto r = sub.solve(parts[k]);
          spare_threads_.fetch_add(1);
          return r;
        }));
      } else {
        results[k] = solve(parts[k]);
      }
    }
    for (auto& [k, f] : pending) results[k] = f.get();
    std::vector<Result> done;
    done.reserve(results.size());
    for (auto& r : results) done.push_back(std::move(*r));
    return alg_.product(done);
  }

  bool take_thread() {
    int n = spare_threads_.load();
    while (n > 0) {
      if (spare_threads_.compare_exchange_weak(n, n - 1)) return true;
    }
    return false;
  }

  const WorldTable& w_;
  const DecomposeOptions& opts_;
  Algebra alg_;
  Budget& budget_;
  std::atomic<int>& spare_threads_;
  detail::Splitter splitter_;
};

template <typename Algebra>
typename Algebra::Result translate(const WsSet& s, const WorldTable& w,
                                   const DecomposeOptions& opts, Algebra alg, Budget& budget) {
  validate(s, w);
  std::atomic<int> spare{static_cast<int>(opts.threads > 0 ? opts.threads - 1 : 0)};
  Translator<Algebra> t(w, opts, alg, budget, spare);
  return t.solve(detail::DescList(s.begin(), s.end()));
}

}  // namespace

double detail::probability(const DescList& s, const WorldTable& w,
                           const DecomposeOptions& opts, Budget& budget) {
  std::atomic<int> spare{0};
  Translator<ProbabilityAlgebra> t(w, opts, ProbabilityAlgebra{w}, budget, spare);
  return t.solve(s);
}

WsTree compute_tree(const WsSet& s, const WorldTable& w, const DecomposeOptions& opts) {
  Budget budget(opts.max_nodes, opts.deadline);
  return translate(s, w, opts, TreeAlgebra{}, budget);
}

ConfidenceResult confidence(const WsSet& s, const WorldTable& w, const DecomposeOptions& opts) {
  Budget budget(opts.max_nodes, opts.deadline);
  const double p = translate(s, w, opts, ProbabilityAlgebra{w}, budget);
  return {p, budget.nodes()};
}

double tree_probability(const WsTree& r, const WorldTable& w) {
  switch (r.kind()) {
    case WsTree::Kind::Top: return 1.0;
    case WsTree::Kind::Bottom: return 0.0;
    case WsTree::Kind::Times: {
      double q = 1.0;
      for (const auto& c : r.children()) q *= 1.0 - tree_probability(c, w);
      return 1.0 - q;
    }
    case WsTree::Kind::Plus: {
      double acc = 0.0;
      for (const auto& b : r.branches()) {
        acc += w.prob(r.variable(), b.value) * tree_probability(b.child, w);
      }
      return acc;
    }
  }
  return 0.0;
}

namespace {

void collect_paths(const WsTree& r, std::vector<Assignment>& path,
                   std::vector<WsDescriptor>& out) {
  switch (r.kind()) {
    case WsTree::Kind::Top: out.emplace_back(path); return;
    case WsTree::Kind::Bottom: return;
    case WsTree::Kind::Times:
      for (const auto& c : r.children()) collect_paths(c, path, out);
      return;
    case WsTree::Kind::Plus:
      for (const auto& b : r.branches()) {
        path.push_back({r.variable(), b.value});
        collect_paths(b.child, path, out);
        path.pop_back();
      }
      return;
  }
}

// Returns the variable set of r, or records a violation.
std::set<VarId> check_node(const WsTree& r, const WorldTable& w, std::set<VarId>& on_path,
                           std::string& why) {
  std::set<VarId> vars;
  if (!why.empty()) return vars;
  switch (r.kind()) {
    case WsTree::Kind::Top:
    case WsTree::Kind::Bottom:
      return vars;
    case WsTree::Kind::Times: {
      for (const auto& c : r.children()) {
        auto cv = check_node(c, w, on_path, why);
        for (VarId v : cv) {
          if (!vars.insert(v).second && why.empty()) {
            why = "⊗ children share variable '" + w.name(v) + "'";
          }
        }
      }
      return vars;
    }
    case WsTree::Kind::Plus: {
      const VarId x = r.variable();
      if (!w.contains(x)) {
        why = "⊕ on unknown variable";
        return vars;
      }
      if (on_path.count(x)) {
        why = "variable '" + w.name(x) + "' repeats on a root-to-leaf path";
        return vars;
      }
      on_path.insert(x);
      vars.insert(x);
      std::set<ValueIdx> seen;
      for (const auto& b : r.branches()) {
        if (!w.valid(x, b.value)) why = "branch value outside the domain of '" + w.name(x) + "'";
        if (!seen.insert(b.value).second) why = "duplicate branch value on '" + w.name(x) + "'";
        auto cv = check_node(b.child, w, on_path, why);
        vars.insert(cv.begin(), cv.end());
      }
      on_path.erase(x);
      return vars;
    }
  }
  return vars;
}

std::size_t count_nodes(const WsTree& r) {
  std::size_t n = 1;
  for (const auto& c : r.children()) n += count_nodes(c);
  for (const auto& b : r.branches()) n += count_nodes(b.child);
  return n;
}

void dump_node(const WsTree& r, const WorldTable& w, int indent, const std::string& label,
               std::ostringstream& os) {
  os << std::string(static_cast<std::size_t>(indent), ' ') << label;
  switch (r.kind()) {
    case WsTree::Kind::Top: os << "T\n"; return;
    case WsTree::Kind::Bottom: os << "F\n"; return;
    case WsTree::Kind::Times:
      os << "*\n";
      for (const auto& c : r.children()) dump_node(c, w, indent + 2, "", os);
      return;
    case WsTree::Kind::Plus: {
      const VarId x = r.variable();
      os << "+" << w.name(x) << "\n";
      for (const auto& b : r.branches()) {
        dump_node(b.child, w, indent + 2,
                  w.name(x) + "=" + w.label(x, b.value) + "@" +
                      format_double(w.prob(x, b.value)) + " ",
                  os);
      }
      return;
    }
  }
}

}  // namespace

WsSet tree_paths(const WsTree& r) {
  std::vector<Assignment> path;
  std::vector<WsDescriptor> out;
  collect_paths(r, path, out);
  return WsSet(std::move(out));
}

std::string check_tree(const WsTree& r, const WorldTable& w) {
  std::set<VarId> on_path;
  std::string why;
  check_node(r, w, on_path, why);
  return why;
}

std::size_t tree_size(const WsTree& r) { return count_nodes(r); }

std::string dump(const WsTree& r, const WorldTable& w) {
  std::ostringstream os;
  dump_node(r, w, 0, "", os);
  return os.str();
}

}  // namespace wscond
