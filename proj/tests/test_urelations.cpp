#include <doctest.h>

#include "fixtures.hpp"
#include "oracle.hpp"
#include "wscond/errors.hpp"
#include "wscond/io.hpp"
#include "wscond/ws_ops.hpp"

using namespace wscond;
using fx::d;

namespace {

Value i64(std::int64_t x) { return Value{x}; }
Value str(const char* s) { return Value{std::string(s)}; }

std::set<Tuple> tuples(const URelation& u) {
  std::set<Tuple> out;
  for (const auto& r : u.rows()) out.insert(r.values);
  return out;
}

BooleanQuery fd_violation() {
  auto pred = Predicate::all_of(
      {Predicate::col_eq("1.SSN", "2.SSN"), Predicate::col_ne("1.NAME", "2.NAME")});
  return {Query::project(Query::join(Query::scan("R"), Query::scan("R"), pred, {"1.", "2."}), {}),
          true};
}

// Per-instance semantics of the operators, independent of the U-relation code.
using Rel = std::set<Tuple>;

Rel inst_select(const Rel& r, std::size_t col, const Value& v) {
  Rel out;
  for (const auto& t : r)
    if (t[col] == v) out.insert(t);
  return out;
}
Rel inst_project(const Rel& r, std::size_t col) {
  Rel out;
  for (const auto& t : r) out.insert(Tuple{t[col]});
  return out;
}
Rel inst_join(const Rel& a, std::size_t ca, const Rel& b, std::size_t cb) {
  Rel out;
  for (const auto& x : a)
    for (const auto& y : b)
      if (x[ca] == y[cb]) {
        Tuple t = x;
        t.insert(t.end(), y.begin(), y.end());
        out.insert(t);
      }
  return out;
}

// Distribution of one derived relation computed per world.
oracle::Distribution per_world(const ProbabilisticDatabase& db,
                               const std::function<Rel(const oracle::Instance&)>& op) {
  oracle::Distribution out;
  oracle::for_each_partial(db.world, oracle::mentioned(db),
                           [&](const oracle::Valuation& val, double p) {
                             oracle::Instance i;
                             i["Q"] = op(oracle::instance_of(db, val));
                             out[i] += p;
                           });
  std::erase_if(out, [](const auto& kv) { return kv.second == 0.0; });
  return out;
}

oracle::Distribution via_urelation(const ProbabilisticDatabase& db, const URelation& q) {
  ProbabilisticDatabase only;
  only.world = db.world;
  only.relations["Q"] = q;
  return oracle::distribution(only);
}

}  // namespace

TEST_SUITE("urelations") {

TEST_CASE("selection") {
  auto db = fx::ssn_db();
  const auto& r = db.relation("R");
  auto bill = select(r, Predicate::eq("NAME", str("Bill")));
  CHECK(bill.size() == 2);
  for (const auto& row : bill.rows()) CHECK(row.values[1] == str("Bill"));
  CHECK(WsSet{bill.rows()[0].wsd, bill.rows()[1].wsd} == fx::set(db.world, {"b=4", "b=7"}));
  CHECK(select(r, Predicate::always()) == r);
  CHECK(select(r, Predicate::never()).empty());
  CHECK_THROWS_AS(select(r, Predicate::eq("AGE", i64(3))), ValidationError);
  auto lt = select(r, Predicate::compare(ColumnRef{"SSN"}, CmpOp::Lt, i64(7)));
  CHECK(tuples(lt) == Rel{{i64(1), str("John")}, {i64(4), str("Bill")}});
  auto neg = select(r, Predicate::negate(Predicate::eq("NAME", str("Bill"))));
  CHECK(neg.size() == 2);
}

TEST_CASE("projection") {
  auto db = fx::ssn_db();
  const auto& r = db.relation("R");
  std::vector<std::string> ssn{"SSN"};
  auto p = project(r, ssn);
  CHECK(p.size() == 4);
  CHECK(p.schema() == Schema{"SSN"});
  for (const auto& row : r.rows()) {
    bool found = false;
    for (const auto& q : p.rows()) found |= q.wsd == row.wsd && q.values[0] == row.values[0];
    CHECK(found);
  }
  std::vector<std::string> all{"SSN", "NAME"};
  auto id = project(r, all);
  auto canon = r;
  canon.canonicalize();
  CHECK(id == canon);
  auto nullary = project(r, std::vector<std::string>{});
  CHECK(nullary.size() == 4);
  for (const auto& row : nullary.rows()) CHECK(row.values.empty());
  CHECK(descriptors_of(nullary) == descriptors_of(r));
  CHECK_THROWS_AS(project(r, std::vector<std::string>{"AGE"}), ValidationError);
}

TEST_CASE("join") {
  auto db = fx::ssn_db();
  const auto& r = db.relation("R");
  auto pred = Predicate::all_of(
      {Predicate::col_eq("1.SSN", "2.SSN"), Predicate::col_ne("1.NAME", "2.NAME")});
  auto j = join(r, r, pred, {"1.", "2."});
  REQUIRE(j.size() == 2);  // (John, Bill) and (Bill, John), same descriptor
  CHECK(descriptors_of(j) == WsSet{d(db.world, "j=7 b=7")});
  CHECK(join(r, r, Predicate::never(), {"1.", "2."}).empty());
  CHECK_THROWS_AS(join(r, r, Predicate::always()), ValidationError);

  WorldTable w;
  w.add_variable("x", {"1", "2"}, {.5, .5});
  w.add_variable("y", {"1", "2"}, {.5, .5});
  URelation a({"A"}), b({"B"});
  a.add(d(w, "x=1"), {i64(1)});
  b.add(d(w, "y=1"), {i64(2)});
  auto ab = join(a, b, Predicate::always());
  REQUIRE(ab.size() == 1);
  CHECK(ab.rows()[0].wsd == d(w, "x=1 y=1"));
  CHECK(ab.rows()[0].values == Tuple{i64(1), i64(2)});
  // Inconsistent descriptors never join.
  URelation c({"C"});
  c.add(d(w, "x=2"), {i64(3)});
  CHECK(join(a, c, Predicate::always()).empty());
}

TEST_CASE("union and difference") {
  auto db = fx::ssn_db();
  const auto& r = db.relation("R");
  auto canon = r;
  canon.canonicalize();
  CHECK(rel_union(r, r) == canon);
  CHECK(rel_difference(r, r, db.world).empty());

  URelation a({"A"}), b({"A"});
  a.add(d(db.world, "j=1"), {i64(5)});
  b.add(d(db.world, "j=1 b=4"), {i64(5)});
  auto df = rel_difference(a, b, db.world);
  REQUIRE(df.size() == 1);
  CHECK(df.rows()[0].wsd == d(db.world, "j=1 b=7"));
  CHECK(WsSet{df.rows()[0].wsd} == diff_singleton(d(db.world, "j=1"), d(db.world, "j=1 b=4"), db.world));
  URelation other({"B"});
  CHECK_THROWS_AS(rel_union(a, other), ValidationError);
}

TEST_CASE("evidence ws-sets") {
  auto db = fx::ssn_db();
  auto fd = evidence_wsset(db, fd_violation());
  std::size_t worlds = 0;
  for (bool b : oracle::omega(fd, db.world)) worlds += b;
  CHECK(worlds == 3);
  CHECK(oracle::same_worlds(fd, fx::ssn_fd_evidence(db.world), db.world));
  CHECK(fd == fx::ssn_fd_evidence(db.world));

  BooleanQuery taut{Query::project(Query::select(Query::scan("R"), Predicate::never()), {}), true};
  CHECK(oracle::probability(evidence_wsset(db, taut), db.world) == doctest::Approx(1.0));
  BooleanQuery contra{Query::select(Query::scan("R"), Predicate::never()), false};
  CHECK(evidence_wsset(db, contra).empty());
}

TEST_CASE("evidence agrees with per-world query evaluation") {
  fx::Rng rng(17);
  for (int i = 0; i < 60; ++i) {
    auto db = fx::random_db(rng, fx::pick(rng, 1, 7), 3, 5);
    std::int64_t k = static_cast<std::int64_t>(fx::pick(rng, 0, 2));
    bool neg = fx::pick(rng, 0, 1);
    // ∃ R(a, b), S(b, c) with a = k
    BooleanQuery q{Query::join(Query::select(Query::scan("R"), Predicate::eq("A", i64(k))),
                               Query::scan("S"), Predicate::col_eq("1.B", "2.B"), {"1.", "2."}),
                   neg};
    auto ev = evidence_wsset(db, q);
    oracle::for_each_world(db.world, [&](const oracle::Valuation& val, double) {
      auto inst = oracle::instance_of(db, val);
      bool holds = !inst_join(inst_select(inst["R"], 0, i64(k)), 1, inst["S"], 0).empty();
      CHECK(oracle::covers(ev, val) == (holds != neg));
    });
  }
}

TEST_CASE("operators commute with the possible-worlds semantics") {
  fx::Rng rng(23);
  for (int i = 0; i < 80; ++i) {
    auto db = fx::random_db(rng, fx::pick(rng, 1, 7), 3, 5);
    const auto& R = db.relation("R");
    const auto& S = db.relation("S");
    auto k = i64(static_cast<std::int64_t>(fx::pick(rng, 0, 2)));
    std::vector<std::string> b{"B"};

    CHECK(oracle::distance(via_urelation(db, select(R, Predicate::eq("A", k))),
                           per_world(db, [&](auto& I) { return inst_select(I.at("R"), 0, k); })) <
          1e-12);
    CHECK(oracle::distance(via_urelation(db, project(R, b)),
                           per_world(db, [&](auto& I) { return inst_project(I.at("R"), 1); })) <
          1e-12);
    auto j = join(R, S, Predicate::col_eq("1.B", "2.B"), {"1.", "2."});
    CHECK(oracle::distance(via_urelation(db, j), per_world(db, [&](auto& I) {
                             return inst_join(I.at("R"), 1, I.at("S"), 0);
                           })) < 1e-12);
    auto pr = project(R, b), ps = project(S, b);
    CHECK(oracle::distance(via_urelation(db, rel_union(pr, ps)), per_world(db, [&](auto& I) {
                             auto out = inst_project(I.at("R"), 1);
                             out.merge(inst_project(I.at("S"), 0));
                             return out;
                           })) < 1e-12);
    CHECK(oracle::distance(via_urelation(db, rel_difference(pr, ps, db.world)),
                           per_world(db, [&](auto& I) {
                             Rel out;
                             auto s = inst_project(I.at("S"), 0);
                             for (const auto& t : inst_project(I.at("R"), 1))
                               if (!s.count(t)) out.insert(t);
                             return out;
                           })) < 1e-12);
    for (const auto& row : j.rows()) {
      // functional by construction
      CHECK_NOTHROW(WsDescriptor(std::vector<Assignment>(row.wsd.begin(), row.wsd.end())));
    }
  }
}

TEST_CASE("world enumeration") {
  {
    auto db = fx::ssn_db();
    WorldEnumerator e(db);
    std::vector<double> ps;
    std::set<oracle::Instance> seen;
    while (e.next()) {
      ps.push_back(e.probability());
      seen.insert(e.instance());
    }
    std::sort(ps.begin(), ps.end());
    REQUIRE(ps.size() == 4);
    CHECK(ps[0] == doctest::Approx(.06).epsilon(1e-12));
    CHECK(ps[1] == doctest::Approx(.14).epsilon(1e-12));
    CHECK(ps[2] == doctest::Approx(.24).epsilon(1e-12));
    CHECK(ps[3] == doctest::Approx(.56).epsilon(1e-12));
    CHECK(seen.size() == 4);
  }
  {
    ProbabilisticDatabase db;
    db.world.add_variable("t", {"0", "1"}, {.5, .5});
    WorldEnumerator e(db);
    int n = 0;
    while (e.next()) ++n;
    CHECK(n == 2);
  }
  {
    ProbabilisticDatabase db;
    db.world = fx::running_world();
    WorldEnumerator e(db);
    int n = 0;
    double sum = 0.0;
    while (e.next()) {
      ++n;
      sum += e.probability();
    }
    CHECK(n == 48);
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    CHECK_THROWS_AS(WorldEnumerator(db, 47), ResourceError);
  }
}

TEST_CASE("database validation and directory round trip") {
  auto db = fx::ssn_db();
  CHECK_NOTHROW(db.validate());
  auto dir = std::filesystem::temp_directory_path() / "wscond_urel_roundtrip";
  std::filesystem::remove_all(dir);
  write_database(db, dir);
  auto back = read_database(dir);
  CHECK(back.world == db.world);
  auto r = db.relation("R");
  r.canonicalize();
  auto r2 = back.relation("R");
  r2.canonicalize();
  CHECK(r2 == r);
  std::filesystem::remove_all(dir);

  auto bad = db;
  URelation u({"A"});
  u.add(WsDescriptor{{7, 0}}, {i64(1)});
  bad.relations["X"] = u;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  CHECK_THROWS_AS(db.relation("nope"), ValidationError);
}

}  // TEST_SUITE
