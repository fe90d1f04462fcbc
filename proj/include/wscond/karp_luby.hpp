#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "wscond/budget.hpp"
#include "wscond/descriptor.hpp"
#include "wscond/world_table.hpp"

namespace wscond {

using Rng = std::mt19937_64;
inline constexpr const char* kRngName = "mt19937_64";

// One Karp-Luby estimator: pick d_i with probability P(d_i)/Z, Z = Σ P(d), draw
// a world of ω(d_i), and score Z if d_i is the first descriptor (canonical
// order) covering that world, else 0. The expectation is P(ω(S)).
class KarpLubySampler {
 public:
  // s nonempty.
  KarpLubySampler(const WsSet& s, const WorldTable& w);

  double total_weight() const { return total_; }
  // The indicator part of one draw (mean P(ω(S)) / Z).
  bool hit(Rng& rng);
  double trial(Rng& rng) { return hit(rng) ? total_ : 0.0; }

 private:
  ValueIdx sample_value(VarId x, Rng& rng);

  const WsSet& s_;
  const WorldTable& w_;
  std::vector<double> cumulative_;
  double total_ = 0.0;
  // Lazily sampled world, valid where stamp_ == epoch_.
  std::vector<ValueIdx> value_;
  std::vector<std::uint64_t> stamp_;
  std::uint64_t epoch_ = 0;
};

// Uniform double in [0, 1) from the top 53 bits; independent of the standard
// library's distribution implementations.
double uniform01(Rng& rng);

double kl_trial(const WsSet& s, const WorldTable& w, Rng& rng);

struct KarpLubyOptions {
  double epsilon = 0.1;
  double delta = 0.1;
  std::uint64_t seed = 0;
  // ⌈4·m·ln(2/δ)/ε²⌉ trials instead of the adaptive scheme.
  bool fixed = false;
  std::uint64_t max_trials = 10'000'000'000ULL;
  std::optional<Clock::time_point> deadline{};
};

struct KarpLubyResult {
  double estimate = 0.0;
  std::uint64_t iterations = 0;
  std::string rng = kRngName;
};

// (ε, δ)-approximation of P(ω(S)): Pr[|ĉ − c| ≤ ε·c] ≥ 1 − δ. The adaptive mode
// is the Dagum-Karp-Luby-Ross AA scheme (stopping-rule pilot, variance pilot,
// main run) on the indicator. Deterministic given the seed.
KarpLubyResult karp_luby_confidence(const WsSet& s, const WorldTable& w,
                                    const KarpLubyOptions& opts = {});

std::uint64_t kl_fixed_trials(std::size_t m, double epsilon, double delta);

}  // namespace wscond
