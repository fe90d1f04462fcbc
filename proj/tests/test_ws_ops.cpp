#include <doctest.h>

#include "fixtures.hpp"
#include "oracle.hpp"
#include "properties.hpp"
#include "wscond/errors.hpp"
#include "wscond/ws_ops.hpp"

using namespace wscond;
using fx::d;

TEST_SUITE("ws_ops") {

TEST_CASE("intersect") {
  auto w = fx::ssn_world();
  auto d1 = d(w, "j=1"), d2 = d(w, "j=7"), d3 = d(w, "j=1 b=4");
  CHECK(intersect(WsSet{d1}, WsSet{d2}).empty());
  CHECK(intersect(WsSet{d1}, WsSet{d3}) == WsSet{d3});
  WsSet s{d1, d(w, "b=7")};
  CHECK(intersect(s, WsSet{WsDescriptor{}}) == s);
}

TEST_CASE("union") {
  auto w = fx::ssn_world();
  auto d1 = d(w, "j=1"), d2 = d(w, "j=7");
  CHECK(unite(WsSet{d1}, WsSet{d2}) == WsSet{d1, d2});
  CHECK(unite(WsSet{d1}, WsSet{}) == WsSet{d1});
  CHECK(unite(WsSet{d1}, WsSet{d1}) == WsSet{d1});
}

TEST_CASE("singleton difference") {
  auto w = fx::ssn_world();
  CHECK(diff_singleton(d(w, "j=7"), d(w, "j=1"), w) == WsSet{d(w, "j=7")});
  CHECK(diff_singleton(d(w, "j=1"), d(w, "j=1 b=4"), w) == WsSet{d(w, "j=1 b=7")});
  CHECK(diff_singleton(WsDescriptor{}, d(w, "b=4"), w) == WsSet{d(w, "b=7")});
  CHECK(oracle::same_worlds(WsSet{d(w, "b=7")},
                            WsSet{d(w, "j=1 b=7"), d(w, "j=7 b=7")}, w));
  // Contained: nothing is left.
  CHECK(diff_singleton(d(w, "j=1 b=4"), d(w, "j=1"), w).empty());
}

TEST_CASE("singleton difference enumerates in ascending variable order") {
  auto w = fx::running_world();
  // {} − {x=1, y=1}: x ≠ 1, then x = 1 ∧ y ≠ 1.
  auto got = diff_singleton(WsDescriptor{}, d(w, "y=1 x=1"), w);
  CHECK(got == fx::set(w, {"x=2", "x=3", "x=1 y=2"}));
}

TEST_CASE("difference") {
  auto w = fx::ssn_world();
  WsSet s{d(w, "j=1"), d(w, "j=7 b=4")};
  CHECK(diff(s, WsSet{}, w) == s);

  auto full = fx::set(w, {"j=1", "j=7"});
  auto fd = diff(full, fx::set(w, {"j=7 b=7"}), w);
  for (std::size_t i = 0; i < fd.size(); ++i)
    for (std::size_t j = i + 1; j < fd.size(); ++j) CHECK(is_mutex(fd[i], fd[j]));
  std::size_t worlds = 0;
  for (bool b : oracle::omega(fd, w)) worlds += b;
  CHECK(worlds == 3);
  CHECK(oracle::probability(fd, w) == doctest::Approx(.44).epsilon(1e-12));
  CHECK(oracle::same_worlds(fd, fx::ssn_fd_evidence(w), w));

  auto self = diff(s, s, w);
  CHECK(oracle::probability(self, w) == 0.0);
  CHECK(self.empty());
}

TEST_CASE("difference respects the blow-up cap") {
  fx::Rng rng(1);
  auto w = fx::random_world(rng, 12, 2);
  // Each disjoint pair doubles the working set: 2, 4, ..., 64.
  std::vector<WsDescriptor> pairs;
  for (VarId v = 0; v + 1 < 12; v += 2) pairs.push_back(WsDescriptor{{v, 0}, {v + 1, 0}});
  CHECK_NOTHROW(diff(WsSet{WsDescriptor{}}, WsSet(pairs), w, 1000));
  CHECK_THROWS_AS(diff(WsSet{WsDescriptor{}}, WsSet(pairs), w, 10), ResourceError);
}

TEST_CASE("diff stream") {
  auto w = fx::ssn_world();
  {
    DiffStream st(d(w, "j=1"), fx::set(w, {"j=1 b=4"}), w);
    auto a = st.next();
    REQUIRE(a);
    CHECK(*a == d(w, "j=1 b=7"));
    CHECK(!st.next());
  }
  {
    DiffStream st(d(w, "j=7"), WsSet{}, w);
    CHECK(st.next() == d(w, "j=7"));
    CHECK(!st.next());
  }
  {
    DiffStream st(WsDescriptor{}, fx::set(w, {"b=4"}), w);
    double sum = 0.0;
    while (auto x = st.next()) sum += descriptor_probability(*x, w);
    CHECK(sum == doctest::Approx(.7).epsilon(1e-12));
  }
  {
    // Stream cap.
    auto w6 = fx::running_world();
    DiffStream st(WsDescriptor{}, fx::set(w6, {"x=1", "y=1"}), w6, 1);
    CHECK_NOTHROW(st.next());
    CHECK_THROWS_AS(st.next(), ResourceError);
  }
}

TEST_CASE("set laws by enumeration") {
  auto t = props::set_laws(101, 150);
  INFO(t.summary());
  CHECK(t.ok());
}

}  // TEST_SUITE
