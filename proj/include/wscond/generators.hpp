#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wscond/budget.hpp"
#include "wscond/descriptor.hpp"
#include "wscond/urelation.hpp"
#include "wscond/world_table.hpp"

namespace wscond {

struct HardInstance {
  WorldTable world;
  WsSet set;
};

// n variables v1..vn with domain {1..r} and weights 1/r, split into s
// contiguous blocks V_1..V_s; w distinct descriptors {x_1↦a_1,…,x_s↦a_s} with
// x_i drawn uniformly from V_i and a_i uniformly from the domain.
// Requires s | n, r ≥ 2, w ≥ 1 and w ≤ (n/s·r)^s.
HardInstance gen_hard_instance(std::size_t n, std::size_t r, std::size_t s, std::size_t w,
                               std::uint64_t seed);

// Adds relation `name` with t tuples, each guarded by its own fresh Boolean
// variable `<name>_t<k>` (p uniform in (0,1)); column values are integers
// drawn uniformly from [0, value_range).
void add_tuple_independent_relation(ProbabilisticDatabase& db, const std::string& name,
                                    std::size_t t, const std::vector<std::string>& columns,
                                    std::uint64_t seed, std::int64_t value_range = 0);

// A database with the single relation R built as above (value_range = t).
ProbabilisticDatabase gen_tuple_independent_db(std::size_t t,
                                               const std::vector<std::string>& columns,
                                               std::uint64_t seed);


// Sums the weights of the valuations (of the variables S mentions) that some
// descriptor covers. Throws ResourceError when there are more than `cap`.
double brute_force_probability(const WsSet& s, const WorldTable& w,
                               std::uint64_t cap = kDefaultWorldCap,
                               std::optional<Clock::time_point> deadline = std::nullopt);

}  // namespace wscond
