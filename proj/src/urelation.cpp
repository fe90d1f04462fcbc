#include "wscond/urelation.hpp"

#include <algorithm>
#include <map>

#include "wscond/errors.hpp"
#include "wscond/ws_ops.hpp"

namespace wscond {

std::string to_string(const Value& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
  return std::get<std::string>(v);
}

URelation::URelation(Schema schema, std::vector<Row> rows) : schema_(std::move(schema)) {
  for (auto& r : rows) add(std::move(r.wsd), std::move(r.values));
}

void URelation::add(WsDescriptor wsd, Tuple values) {
  if (values.size() != schema_.size()) {
    throw ValidationError("row arity " + std::to_string(values.size()) +
                          " does not match schema arity " + std::to_string(schema_.size()));
  }
  rows_.push_back(Row{std::move(wsd), std::move(values)});
}

std::size_t URelation::column(std::string_view name) const {
  for (std::size_t i = 0; i < schema_.size(); ++i) {
    if (schema_[i] == name) return i;
  }
  throw ValidationError("unknown column '" + std::string(name) + "'");
}

void URelation::canonicalize() {
  std::sort(rows_.begin(), rows_.end());
  rows_.erase(std::unique(rows_.begin(), rows_.end()), rows_.end());
}

const URelation& ProbabilisticDatabase::relation(const std::string& name) const {
  auto it = relations.find(name);
  if (it == relations.end()) throw ValidationError("unknown relation '" + name + "'");
  return it->second;
}

void ProbabilisticDatabase::validate() const {
  for (const auto& [name, rel] : relations) {
    for (const auto& row : rel.rows()) wscond::validate(row.wsd, world);
  }
}

// ---------------------------------------------------------------------------
// Predicates

struct Predicate::Node {
  enum class Kind { True, False, Compare, And, Or, Not } kind;
  Operand lhs;
  CmpOp op = CmpOp::Eq;
  Operand rhs;
  std::vector<Predicate> parts;
};

Predicate Predicate::always() {
  return Predicate(std::make_shared<Node>(Node{Node::Kind::True, {}, {}, {}, {}}));
}

Predicate Predicate::never() {
  return Predicate(std::make_shared<Node>(Node{Node::Kind::False, {}, {}, {}, {}}));
}

Predicate Predicate::compare(Operand lhs, CmpOp op, Operand rhs) {
  return Predicate(std::make_shared<Node>(
      Node{Node::Kind::Compare, std::move(lhs), op, std::move(rhs), {}}));
}

Predicate Predicate::all_of(std::vector<Predicate> parts) {
  return Predicate(std::make_shared<Node>(Node{Node::Kind::And, {}, {}, {}, std::move(parts)}));
}

Predicate Predicate::any_of(std::vector<Predicate> parts) {
  return Predicate(std::make_shared<Node>(Node{Node::Kind::Or, {}, {}, {}, std::move(parts)}));
}

Predicate Predicate::negate(Predicate p) {
  return Predicate(std::make_shared<Node>(Node{Node::Kind::Not, {}, {}, {}, {std::move(p)}}));
}

Predicate Predicate::eq(std::string column, Value constant) {
  return compare(ColumnRef{std::move(column)}, CmpOp::Eq, std::move(constant));
}

Predicate Predicate::col_eq(std::string a, std::string b) {
  return compare(ColumnRef{std::move(a)}, CmpOp::Eq, ColumnRef{std::move(b)});
}

Predicate Predicate::col_ne(std::string a, std::string b) {
  return compare(ColumnRef{std::move(a)}, CmpOp::Ne, ColumnRef{std::move(b)});
}

namespace {

using Bound = std::function<bool(std::span<const Value>)>;
using Getter = std::function<const Value&(std::span<const Value>)>;

Getter bind_operand(const Operand& o, const Schema& schema) {
  if (const auto* c = std::get_if<ColumnRef>(&o)) {
    auto it = std::find(schema.begin(), schema.end(), c->name);
    if (it == schema.end()) throw ValidationError("unknown column '" + c->name + "'");
    const auto idx = static_cast<std::size_t>(it - schema.begin());
    return [idx](std::span<const Value> t) -> const Value& { return t[idx]; };
  }
  return [v = std::get<Value>(o)](std::span<const Value>) -> const Value& { return v; };
}

bool apply(CmpOp op, const Value& a, const Value& b) {
  switch (op) {
    case CmpOp::Eq: return a == b;
    case CmpOp::Ne: return a != b;
    case CmpOp::Lt: return a < b;
    case CmpOp::Le: return a <= b;
    case CmpOp::Gt: return a > b;
    case CmpOp::Ge: return a >= b;
  }
  return false;
}

}  // namespace

Bound Predicate::bind(const Schema& schema) const {
  using K = Node::Kind;
  const Node& n = *node_;
  switch (n.kind) {
    case K::True: return [](std::span<const Value>) { return true; };
    case K::False: return [](std::span<const Value>) { return false; };
    case K::Compare: {
      auto l = bind_operand(n.lhs, schema);
      auto r = bind_operand(n.rhs, schema);
      return [l, r, op = n.op](std::span<const Value> t) { return apply(op, l(t), r(t)); };
    }
    case K::And:
    case K::Or: {
      std::vector<Bound> parts;
      for (const auto& p : n.parts) parts.push_back(p.bind(schema));
      const bool conj = n.kind == K::And;
      return [parts, conj](std::span<const Value> t) {
        for (const auto& p : parts) {
          if (p(t) != conj) return !conj;
        }
        return conj;
      };
    }
    case K::Not: {
      auto inner = n.parts.front().bind(schema);
      return [inner](std::span<const Value> t) { return !inner(t); };
    }
  }
  return [](std::span<const Value>) { return false; };
}

// ---------------------------------------------------------------------------
// Algebra

URelation select(const URelation& u, const Predicate& pred) {
  auto test = pred.bind(u.schema());
  URelation out(u.schema());
  for (const auto& row : u.rows()) {
    if (test(row.values)) out.add(row.wsd, row.values);
  }
  return out;
}

URelation project(const URelation& u, std::span<const std::string> columns) {
  std::vector<std::size_t> idx;
  for (const auto& c : columns) idx.push_back(u.column(c));
  URelation out(Schema(columns.begin(), columns.end()));
  for (const auto& row : u.rows()) {
    Tuple t;
    t.reserve(idx.size());
    for (auto i : idx) t.push_back(row.values[i]);
    out.add(row.wsd, std::move(t));
  }
  out.canonicalize();
  return out;
}

URelation join(const URelation& u1, const URelation& u2, const Predicate& pred,
               const JoinPrefixes& prefixes) {
  Schema schema;
  for (const auto& c : u1.schema()) schema.push_back(prefixes.left + c);
  for (const auto& c : u2.schema()) schema.push_back(prefixes.right + c);
  {
    auto sorted = schema;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw ValidationError("join output has colliding column names; supply prefixes");
    }
  }
  auto test = pred.bind(schema);
  URelation out(schema);
  Tuple t;
  for (const auto& a : u1.rows()) {
    for (const auto& b : u2.rows()) {
      if (!consistent(a.wsd, b.wsd)) continue;
      t.assign(a.values.begin(), a.values.end());
      t.insert(t.end(), b.values.begin(), b.values.end());
      if (test(t)) out.add(merge(a.wsd, b.wsd), t);
    }
  }
  return out;
}

namespace {

std::map<Tuple, WsSet> group_by_tuple(const URelation& u) {
  std::map<Tuple, std::vector<WsDescriptor>> acc;
  for (const auto& row : u.rows()) acc[row.values].push_back(row.wsd);
  std::map<Tuple, WsSet> out;
  for (auto& [t, ds] : acc) out.emplace(t, WsSet(std::move(ds)));
  return out;
}

void check_same_schema(const URelation& a, const URelation& b) {
  if (a.schema() != b.schema()) throw ValidationError("schema mismatch in set operation");
}

URelation from_groups(const Schema& schema, const std::map<Tuple, WsSet>& groups) {
  URelation out(schema);
  for (const auto& [t, s] : groups) {
    for (const auto& d : s) out.add(d, t);
  }
  out.canonicalize();
  return out;
}

}  // namespace

URelation rel_union(const URelation& u1, const URelation& u2) {
  check_same_schema(u1, u2);
  auto g1 = group_by_tuple(u1);
  for (auto& [t, s] : group_by_tuple(u2)) {
    auto [it, fresh] = g1.emplace(t, s);
    if (!fresh) it->second = unite(it->second, s);
  }
  return from_groups(u1.schema(), g1);
}

URelation rel_difference(const URelation& u1, const URelation& u2, const WorldTable& w) {
  check_same_schema(u1, u2);
  auto g1 = group_by_tuple(u1);
  const auto g2 = group_by_tuple(u2);
  std::map<Tuple, WsSet> out;
  for (const auto& [t, s] : g1) {
    auto it = g2.find(t);
    WsSet rest = it == g2.end() ? s : diff(s, it->second, w);
    if (!rest.empty()) out.emplace(t, std::move(rest));
  }
  return from_groups(u1.schema(), out);
}

WsSet descriptors_of(const URelation& u) {
  std::vector<WsDescriptor> ds;
  ds.reserve(u.size());
  for (const auto& row : u.rows()) ds.push_back(row.wsd);
  return WsSet(std::move(ds));
}

// ---------------------------------------------------------------------------
// Queries

struct Query::Node {
  enum class Kind { Scan, Select, Project, Join, Union } kind;
  std::string relation;
  std::vector<Query> inputs;
  std::optional<Predicate> pred;
  std::vector<std::string> columns;
  JoinPrefixes prefixes;
};

Query Query::scan(std::string relation) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Scan;
  n->relation = std::move(relation);
  return Query(n);
}

Query Query::select(Query q, Predicate pred) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Select;
  n->inputs = {std::move(q)};
  n->pred = std::move(pred);
  return Query(n);
}

Query Query::project(Query q, std::vector<std::string> columns) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Project;
  n->inputs = {std::move(q)};
  n->columns = std::move(columns);
  return Query(n);
}

Query Query::join(Query l, Query r, Predicate pred, JoinPrefixes prefixes) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Join;
  n->inputs = {std::move(l), std::move(r)};
  n->pred = std::move(pred);
  n->prefixes = std::move(prefixes);
  return Query(n);
}

Query Query::unite(Query l, Query r) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Union;
  n->inputs = {std::move(l), std::move(r)};
  return Query(n);
}

URelation Query::evaluate(const ProbabilisticDatabase& db) const {
  using K = Node::Kind;
  const Node& n = *node_;
  switch (n.kind) {
    case K::Scan: return db.relation(n.relation);
    case K::Select: return wscond::select(n.inputs[0].evaluate(db), *n.pred);
    case K::Project: return wscond::project(n.inputs[0].evaluate(db), n.columns);
    case K::Join:
      return wscond::join(n.inputs[0].evaluate(db), n.inputs[1].evaluate(db), *n.pred,
                          n.prefixes);
    case K::Union:
      return rel_union(n.inputs[0].evaluate(db), n.inputs[1].evaluate(db));
  }
  throw ValidationError("malformed query");
}

WsSet evidence_wsset(const ProbabilisticDatabase& db, const BooleanQuery& q) {
  WsSet positive = normalize(descriptors_of(q.body.evaluate(db)), db.world);
  if (!q.complemented) return positive;
  return diff(WsSet{WsDescriptor{}}, positive, db.world);
}

// ---------------------------------------------------------------------------
// World enumeration

bool satisfied_by(const WsDescriptor& d, std::span<const ValueIdx> valuation) {
  for (const auto& a : d) {
    if (valuation[a.var] != a.value) return false;
  }
  return true;
}

WorldEnumerator::WorldEnumerator(const ProbabilisticDatabase& db, std::uint64_t cap)
    : db_(&db), valuation_(db.world.size(), 0) {
  const auto count = db.world.world_count();
  if (count > cap) {
    throw ResourceError("world count " + std::to_string(count) + " exceeds cap " +
                        std::to_string(cap));
  }
}

bool WorldEnumerator::next() {
  if (done_) return false;
  const auto& w = db_->world;
  if (!started_) {
    started_ = true;
  } else {
    // Mixed-radix increment.
    std::size_t i = 0;
    for (; i < valuation_.size(); ++i) {
      if (++valuation_[i] < w.domain_size(static_cast<VarId>(i))) break;
      valuation_[i] = 0;
    }
    if (i == valuation_.size()) {
      done_ = true;
      return false;
    }
  }
  prob_ = 1.0;
  for (std::size_t v = 0; v < valuation_.size(); ++v) {
    prob_ *= w.prob(static_cast<VarId>(v), valuation_[v]);
  }
  return true;
}

Instance WorldEnumerator::instance() const {
  Instance inst;
  for (const auto& [name, rel] : db_->relations) {
    auto& tuples = inst[name];
    for (const auto& row : rel.rows()) {
      if (satisfied_by(row.wsd, valuation_)) tuples.insert(row.values);
    }
  }
  return inst;
}

}  // namespace wscond
