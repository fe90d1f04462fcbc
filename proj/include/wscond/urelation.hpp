#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "wscond/descriptor.hpp"
#include "wscond/world_table.hpp"

namespace wscond {

// Data constants are integers or strings.
using Value = std::variant<std::int64_t, std::string>;
using Tuple = std::vector<Value>;
using Schema = std::vector<std::string>;

std::string to_string(const Value& v);

struct Row {
  WsDescriptor wsd;
  Tuple values;

  friend auto operator<=>(const Row&, const Row&) = default;
  friend bool operator==(const Row&, const Row&) = default;
};

class URelation {
 public:
  URelation() = default;
  explicit URelation(Schema schema) : schema_(std::move(schema)) {}
  URelation(Schema schema, std::vector<Row> rows);

  const Schema& schema() const { return schema_; }
  std::size_t arity() const { return schema_.size(); }
  std::span<const Row> rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }

  // Throws ValidationError on arity mismatch.
  void add(WsDescriptor wsd, Tuple values);

  // Index of a column; throws ValidationError when unknown.
  std::size_t column(std::string_view name) const;

  // Sorts rows by (wsd, tuple) and drops exact duplicates.
  void canonicalize();

  friend bool operator==(const URelation&, const URelation&) = default;

 private:
  Schema schema_;
  std::vector<Row> rows_;
};

struct ProbabilisticDatabase {
  WorldTable world;
  std::map<std::string, URelation> relations;

  const URelation& relation(const std::string& name) const;
  // Throws ValidationError if some row descriptor is not valid in `world`.
  void validate() const;
};

// ---------------------------------------------------------------------------
// Predicates over data columns.

struct ColumnRef {
  std::string name;
};

using Operand = std::variant<ColumnRef, Value>;

enum class CmpOp { Eq, Ne, Lt, Le, Gt, Ge };

class Predicate {
 public:
  static Predicate always();
  static Predicate never();
  static Predicate compare(Operand lhs, CmpOp op, Operand rhs);
  static Predicate all_of(std::vector<Predicate> parts);
  static Predicate any_of(std::vector<Predicate> parts);
  static Predicate negate(Predicate p);

  // Convenience: column = constant, column = column.
  static Predicate eq(std::string column, Value constant);
  static Predicate col_eq(std::string a, std::string b);
  static Predicate col_ne(std::string a, std::string b);

  // Resolves column names against a schema; throws ValidationError for unknown columns.
  std::function<bool(std::span<const Value>)> bind(const Schema& schema) const;

  struct Node;

 private:
  explicit Predicate(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

// ---------------------------------------------------------------------------
// Positive relational algebra on U-relations.

URelation select(const URelation& u, const Predicate& pred);
URelation project(const URelation& u, std::span<const std::string> columns);

struct JoinPrefixes {
  std::string left;
  std::string right;
};

// Output schema is prefixed left columns followed by prefixed right columns;
// throws ValidationError on a column-name collision.
URelation join(const URelation& u1, const URelation& u2, const Predicate& pred,
               const JoinPrefixes& prefixes = {"", ""});

// Per data tuple, descriptor sets are combined with ws-set union/difference.
URelation rel_union(const URelation& u1, const URelation& u2);
URelation rel_difference(const URelation& u1, const URelation& u2, const WorldTable& w);

// Descriptor column of a relation as a ws-set (nullary projection).
WsSet descriptors_of(const URelation& u);

// ---------------------------------------------------------------------------
// Evidence queries: positive algebra, optionally complemented at the top.

class Query {
 public:
  static Query scan(std::string relation);
  static Query select(Query q, Predicate pred);
  static Query project(Query q, std::vector<std::string> columns);
  static Query join(Query l, Query r, Predicate pred, JoinPrefixes prefixes);
  static Query unite(Query l, Query r);

  URelation evaluate(const ProbabilisticDatabase& db) const;

  struct Node;

 private:
  explicit Query(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

struct BooleanQuery {
  Query body;
  bool complemented = false;
};

// Normalized ws-set of the worlds where the Boolean query holds.
WsSet evidence_wsset(const ProbabilisticDatabase& db, const BooleanQuery& q);

// ---------------------------------------------------------------------------
// Possible-world enumeration (oracle support).

inline constexpr std::uint64_t kDefaultWorldCap = std::uint64_t{1} << 24;

// One relation instance of one world: the set of present tuples.
using Instance = std::map<std::string, std::set<Tuple>>;

class WorldEnumerator {
 public:
  // Throws ResourceError if the world count exceeds `cap`.
  explicit WorldEnumerator(const ProbabilisticDatabase& db,
                           std::uint64_t cap = kDefaultWorldCap);

  // Advances to the next total valuation; false when exhausted.
  bool next();

  std::span<const ValueIdx> valuation() const { return valuation_; }
  double probability() const { return prob_; }
  Instance instance() const;

 private:
  const ProbabilisticDatabase* db_;
  std::vector<ValueIdx> valuation_;
  double prob_ = 0.0;
  bool started_ = false;
  bool done_ = false;
};

bool satisfied_by(const WsDescriptor& d, std::span<const ValueIdx> valuation);

}  // namespace wscond
