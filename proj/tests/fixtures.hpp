#pragma once

// Small worked databases plus random instance generators for the property
// suites.

#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "wscond/decompose.hpp"
#include "wscond/descriptor.hpp"
#include "wscond/urelation.hpp"
#include "wscond/world_table.hpp"

namespace fx {

using namespace wscond;

// "x=1 y=2" → {x↦1, y↦2}; names and labels looked up in w.
inline WsDescriptor d(const WorldTable& w, const std::string& text) {
  std::vector<Assignment> as;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) {
    auto eq = tok.find('=');
    VarId v = w.require(tok.substr(0, eq));
    as.push_back({v, w.require_value(v, tok.substr(eq + 1))});
  }
  return WsDescriptor(std::move(as));
}

inline WsSet set(const WorldTable& w, const std::vector<std::string>& texts) {
  std::vector<WsDescriptor> ds;
  for (const auto& t : texts) ds.push_back(d(w, t));
  return WsSet(std::move(ds));
}

// --- SSN cleaning example ---------------------------------------------------

inline WorldTable ssn_world() {
  WorldTable w;
  w.add_variable("j", {"1", "7"}, {.2, .8});
  w.add_variable("b", {"4", "7"}, {.3, .7});
  return w;
}

inline ProbabilisticDatabase ssn_db() {
  ProbabilisticDatabase db;
  db.world = ssn_world();
  URelation r({"SSN", "NAME"});
  r.add(d(db.world, "j=1"), {std::int64_t{1}, std::string("John")});
  r.add(d(db.world, "j=7"), {std::int64_t{7}, std::string("John")});
  r.add(d(db.world, "b=4"), {std::int64_t{4}, std::string("Bill")});
  r.add(d(db.world, "b=7"), {std::int64_t{7}, std::string("Bill")});
  db.relations["R"] = r;
  return db;
}

// Worlds where SSN → NAME holds.
inline WsSet ssn_fd_evidence(const WorldTable& w) { return set(w, {"j=1", "j=7 b=4"}); }

// The conditioned database printed after the conditioning introduction.
inline ProbabilisticDatabase ssn_conditioned_db() {
  ProbabilisticDatabase db;
  db.world.add_variable("b", {"4", "7"}, {.3, .7});
  db.world.add_variable("j'", {"1", "7"}, {.2 / .44, .8 * .3 / .44});
  const auto& w = db.world;
  URelation r({"SSN", "NAME"});
  r.add(d(w, "j'=1"), {std::int64_t{1}, std::string("John")});
  r.add(d(w, "j'=7"), {std::int64_t{7}, std::string("John")});
  r.add(d(w, "j'=1 b=4"), {std::int64_t{4}, std::string("Bill")});
  r.add(d(w, "j'=1 b=7"), {std::int64_t{7}, std::string("Bill")});
  r.add(d(w, "j'=7"), {std::int64_t{4}, std::string("Bill")});
  db.relations["R"] = r;
  return db;
}

// --- Running example: ws-tree R and ws-set S --------------------------------

inline WorldTable running_world() {
  WorldTable w;
  w.add_variable("x", {"1", "2", "3"}, {.1, .4, .5});
  w.add_variable("y", {"1", "2"}, {.2, .8});
  w.add_variable("z", {"1", "2"}, {.4, .6});
  w.add_variable("u", {"1", "2"}, {.7, .3});
  w.add_variable("v", {"1", "2"}, {.5, .5});
  return w;
}

inline WsSet running_set(const WorldTable& w) {
  return set(w, {"x=1", "x=2 y=1", "x=2 z=1", "u=1 v=1", "u=2"});
}

inline WsTree leaf_on(const WorldTable& w, const std::string& var, const std::string& label,
                      WsTree child = WsTree::top()) {
  VarId v = w.require(var);
  return WsTree::plus(v, {WsBranch{w.require_value(v, label), std::move(child)}});
}

// Left subtree l (x, y, z).
inline WsTree running_left(const WorldTable& w) {
  VarId x = w.require("x");
  auto lr = WsTree::times({leaf_on(w, "y", "1"), leaf_on(w, "z", "1")});
  return WsTree::plus(x, {WsBranch{0, WsTree::top()}, WsBranch{1, lr}});
}

inline WsTree running_left_right(const WorldTable& w) {
  return WsTree::times({leaf_on(w, "y", "1"), leaf_on(w, "z", "1")});
}

// Right subtree r (u, v).
inline WsTree running_right(const WorldTable& w) {
  VarId u = w.require("u");
  return WsTree::plus(u, {WsBranch{0, leaf_on(w, "v", "1")}, WsBranch{1, WsTree::top()}});
}

inline WsTree running_tree(const WorldTable& w) {
  return WsTree::times({running_left(w), running_right(w)});
}

// --- U-relation conditioned on R --------------------------------------------

inline ProbabilisticDatabase renorm_db() {
  ProbabilisticDatabase db;
  db.world = running_world();
  URelation u({"A"});
  u.add(d(db.world, "y=2 u=1"), {std::string("a1")});
  u.add(d(db.world, "u=1 v=2"), {std::string("a2")});
  db.relations["U"] = u;
  return db;
}

struct FreshVar {
  std::string source;
  std::vector<std::pair<std::string, double>> alternatives;
};

// ΔW as listed next to the renormalized tree.
inline std::vector<FreshVar> renorm_delta() {
  return {
      {"x", {{"1", .1 / .308}, {"2", .208 / .308}}},
      {"y", {{"1", 1.0}}},
      {"z", {{"1", 1.0}}},
      {"u", {{"1", .35 / .65}, {"2", .3 / .65}}},
      {"v", {{"1", 1.0}}},
  };
}

// U' of the worked conditioning example; primed names refer to the fresh
// variables of renorm_delta.
inline std::vector<std::vector<std::pair<std::string, std::string>>> renorm_rewritten() {
  return {
      {{"x'", "1"}, {"y", "2"}, {"u", "1"}},
      {{"x'", "1"}, {"u", "1"}, {"v", "2"}},
      {{"x'", "2"}, {"y'", "1"}, {"u", "1"}, {"v", "2"}},
      {{"x'", "2"}, {"z'", "1"}, {"y", "2"}, {"u", "1"}},
      {{"x'", "2"}, {"z'", "1"}, {"u", "1"}, {"v", "2"}},
      {{"u'", "1"}, {"v'", "1"}, {"y", "2"}},
  };
}

// The database after the three simplifications.
inline ProbabilisticDatabase renorm_simplified() {
  ProbabilisticDatabase db;
  auto& w = db.world;
  w.add_variable("x'", {"1", "2"}, {.1 / .308, .208 / .308});
  w.add_variable("y", {"1", "2"}, {.2, .8});
  w.add_variable("u", {"1", "2"}, {.7, .3});
  w.add_variable("u'", {"1", "2"}, {.35 / .65, .3 / .65});
  w.add_variable("v", {"1", "2"}, {.5, .5});
  URelation u({"A"});
  u.add(d(w, "x'=1 y=2 u=1"), {std::string("a1")});
  u.add(d(w, "x'=1 u=1 v=2"), {std::string("a2")});
  u.add(d(w, "x'=2 u=1 v=2"), {std::string("a2")});
  u.add(d(w, "x'=2 y=2 u=1"), {std::string("a1")});
  u.add(d(w, "x'=2 u=1 v=2"), {std::string("a2")});
  u.add(d(w, "u'=1 y=2"), {std::string("a1")});
  db.relations["U"] = u;
  return db;
}

// --- Random instances --------------------------------------------------------

using Rng = std::mt19937_64;

inline std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

// n variables with domains of size 1..r (size 1 only if allow_singleton) and
// random positive weights.
inline WorldTable random_world(Rng& rng, std::size_t n, std::size_t r,
                               bool allow_singleton = false) {
  WorldTable w;
  std::uniform_real_distribution<double> u(0.05, 1.0);
  for (std::size_t v = 0; v < n; ++v) {
    std::size_t k = pick(rng, allow_singleton ? 1 : 2, std::max<std::size_t>(r, 2));
    std::vector<std::string> labels;
    std::vector<double> probs;
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      labels.push_back(std::to_string(i + 1));
      probs.push_back(u(rng));
      sum += probs.back();
    }
    for (auto& p : probs) p /= sum;
    // Make the weights sum to 1 as exactly as possible.
    double rest = 1.0;
    for (std::size_t i = 0; i + 1 < k; ++i) rest -= probs[i];
    probs.back() = rest;
    w.add_variable("v" + std::to_string(v), std::move(labels), std::move(probs));
  }
  return w;
}

// A random descriptor with 0..max_len assignments (empty only if allow_empty).
inline WsDescriptor random_descriptor(Rng& rng, const WorldTable& w, std::size_t max_len,
                                      bool allow_empty = false) {
  std::size_t len = pick(rng, allow_empty ? 0 : 1, std::min(max_len, w.size()));
  std::vector<VarId> vars(w.size());
  for (VarId v = 0; v < vars.size(); ++v) vars[v] = v;
  std::shuffle(vars.begin(), vars.end(), rng);
  std::vector<Assignment> as;
  for (std::size_t i = 0; i < len; ++i) {
    as.push_back({vars[i], static_cast<ValueIdx>(pick(rng, 0, w.domain_size(vars[i]) - 1))});
  }
  return WsDescriptor(std::move(as));
}

inline WsSet random_set(Rng& rng, const WorldTable& w, std::size_t max_size, std::size_t max_len,
                        std::size_t min_size = 0) {
  std::size_t m = pick(rng, min_size, max_size);
  std::vector<WsDescriptor> ds;
  for (std::size_t i = 0; i < m; ++i) ds.push_back(random_descriptor(rng, w, max_len));
  return WsSet(std::move(ds));
}

// A small database: relations R(A, B) and S(B, C) over a random world table,
// integer values in [0, value_range).
inline ProbabilisticDatabase random_db(Rng& rng, std::size_t n, std::size_t r,
                                       std::size_t rows, std::int64_t value_range = 3) {
  ProbabilisticDatabase db;
  db.world = random_world(rng, n, r);
  std::uniform_int_distribution<std::int64_t> val(0, value_range - 1);
  auto fill = [&](const std::string& name, Schema schema) {
    URelation u(std::move(schema));
    std::size_t k = pick(rng, 1, rows);
    for (std::size_t i = 0; i < k; ++i) {
      u.add(random_descriptor(rng, db.world, 3), {val(rng), val(rng)});
    }
    db.relations[name] = u;
  };
  fill("R", {"A", "B"});
  fill("S", {"B", "C"});
  return db;
}

}  // namespace fx
