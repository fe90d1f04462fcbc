#include "wscond/generators.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "wscond/errors.hpp"
#include "wscond/karp_luby.hpp"
#include "compensated_sum.hpp"

namespace wscond {

namespace {

std::uint64_t below(Rng& rng, std::uint64_t n) {
  return static_cast<std::uint64_t>(uniform01(rng) * static_cast<double>(n)) % n;
}

}  // namespace

HardInstance gen_hard_instance(std::size_t n, std::size_t r, std::size_t s, std::size_t w,
                               std::uint64_t seed) {
  if (s == 0 || n == 0 || n % s != 0) throw ValidationError("s must divide n");
  if (r < 2) throw ValidationError("r must be at least 2");
  if (w < 1) throw ValidationError("w must be at least 1");
  const std::size_t block = n / s;
  const double distinct = std::pow(static_cast<double>(block * r), static_cast<double>(s));
  if (static_cast<double>(w) > distinct) {
    throw ValidationError("w exceeds the number of distinct descriptors");
  }

  HardInstance out;
  std::vector<std::string> labels;
  for (std::size_t i = 1; i <= r; ++i) labels.push_back(std::to_string(i));
  const std::vector<double> probs(r, 1.0 / static_cast<double>(r));
  for (std::size_t k = 1; k <= n; ++k) out.world.add_variable("v" + std::to_string(k), labels, probs);

  Rng rng(seed);
  std::unordered_set<WsDescriptor, WsDescriptorHash> seen;
  std::vector<WsDescriptor> descriptors;
  const std::size_t max_draws = 100 * w + 1000;
  std::size_t draws = 0;
  while (descriptors.size() < w) {
    if (++draws > max_draws) {
      throw ResourceError("could not sample " + std::to_string(w) + " distinct descriptors");
    }
    std::vector<Assignment> as;
    for (std::size_t i = 0; i < s; ++i) {
      const auto var = static_cast<VarId>(i * block + below(rng, block));
      const auto value = static_cast<ValueIdx>(below(rng, r));
      as.push_back({var, value});
    }
    WsDescriptor d = WsDescriptor::from_sorted(std::move(as));
    if (seen.insert(d).second) descriptors.push_back(std::move(d));
  }
  out.set = WsSet(std::move(descriptors));
  return out;
}

void add_tuple_independent_relation(ProbabilisticDatabase& db, const std::string& name,
                                    std::size_t t, const std::vector<std::string>& columns,
                                    std::uint64_t seed, std::int64_t value_range) {
  if (db.relations.count(name)) throw ValidationError("duplicate relation '" + name + "'");
  if (value_range <= 0) value_range = std::max<std::int64_t>(1, static_cast<std::int64_t>(t));
  Rng rng(seed);
  URelation rel{Schema(columns)};
  for (std::size_t k = 1; k <= t; ++k) {
    // p in (0, 1), never exactly 0 or 1.
    double p = uniform01(rng);
    while (p == 0.0) p = uniform01(rng);
    const VarId x = db.world.add_variable(name + "_t" + std::to_string(k), {"0", "1"},
                                          {1.0 - p, p});
    Tuple values;
    for (std::size_t c = 0; c < columns.size(); ++c) {
      values.emplace_back(static_cast<std::int64_t>(below(rng, static_cast<std::uint64_t>(value_range))));
    }
    rel.add(WsDescriptor({Assignment{x, 1}}), std::move(values));
  }
  rel.canonicalize();
  db.relations.emplace(name, std::move(rel));
}

ProbabilisticDatabase gen_tuple_independent_db(std::size_t t,
                                               const std::vector<std::string>& columns,
                                               std::uint64_t seed) {
  ProbabilisticDatabase db;
  add_tuple_independent_relation(db, "R", t, columns, seed);
  return db;
}

double brute_force_probability(const WsSet& s, const WorldTable& w, std::uint64_t cap,
                               std::optional<Clock::time_point> deadline) {
  validate(s, w);
  if (s.empty()) return 0.0;
  if (s.has_universal()) return 1.0;

  std::vector<VarId> vars;
  for (const auto& d : s)
    for (const auto& a : d) vars.push_back(a.var);
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  std::uint64_t worlds = 1;
  for (VarId v : vars) {
    worlds *= w.domain_size(v);
    if (worlds > cap) {
      throw ResourceError("brute force over more than " + std::to_string(cap) + " worlds");
    }
  }

  std::vector<ValueIdx> value(w.size(), 0);
  detail::CompensatedSum total;
  for (std::uint64_t k = 0; k < worlds; ++k) {
    if (deadline && (k & 0xffff) == 0 && Clock::now() > *deadline) throw DeadlineExceeded();
    double p = 1.0;
    for (VarId v : vars) p *= w.prob(v, value[v]);
    const bool covered = std::any_of(s.begin(), s.end(), [&](const WsDescriptor& d) {
      return std::all_of(d.begin(), d.end(),
                         [&](const Assignment& a) { return value[a.var] == a.value; });
    });
    if (covered) total.add(p);
    for (VarId v : vars) {
      if (++value[v] < w.domain_size(v)) break;
      value[v] = 0;
    }
  }
  return total.value();
}

}  // namespace wscond
