#include "wscond/karp_luby.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "wscond/errors.hpp"

namespace wscond {

double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

KarpLubySampler::KarpLubySampler(const WsSet& s, const WorldTable& w)
    : s_(s), w_(w), value_(w.size(), 0), stamp_(w.size(), 0) {
  if (s.empty()) throw ValidationError("Karp-Luby needs a nonempty ws-set");
  cumulative_.reserve(s.size());
  for (const auto& d : s) {
    total_ += descriptor_probability(d, w);
    cumulative_.push_back(total_);
  }
}

ValueIdx KarpLubySampler::sample_value(VarId x, Rng& rng) {
  const double u = uniform01(rng);
  const auto probs = w_.probs(x);
  double acc = 0.0;
  for (ValueIdx i = 0; i + 1 < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return i;
  }
  return static_cast<ValueIdx>(probs.size() - 1);
}

bool KarpLubySampler::hit(Rng& rng) {
  const double u = uniform01(rng) * total_;
  // upper_bound never lands on a zero-weight descriptor.
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  if (it == cumulative_.end()) --it;
  const auto i = static_cast<std::size_t>(it - cumulative_.begin());

  ++epoch_;
  for (const auto& a : s_[i]) {
    stamp_[a.var] = epoch_;
    value_[a.var] = a.value;
  }
  auto value = [&](VarId x) {
    if (stamp_[x] != epoch_) {
      stamp_[x] = epoch_;
      value_[x] = sample_value(x, rng);
    }
    return value_[x];
  };
  for (std::size_t j = 0; j < i; ++j) {
    bool covers = true;
    for (const auto& a : s_[j]) {
      if (value(a.var) != a.value) {
        covers = false;
        break;
      }
    }
    if (covers) return false;
  }
  return true;
}

double kl_trial(const WsSet& s, const WorldTable& w, Rng& rng) {
  KarpLubySampler sampler(s, w);
  return sampler.trial(rng);
}

std::uint64_t kl_fixed_trials(std::size_t m, double epsilon, double delta) {
  return static_cast<std::uint64_t>(
      std::ceil(4.0 * static_cast<double>(m) * std::log(2.0 / delta) / (epsilon * epsilon)));
}

namespace {

class Runner {
 public:
  Runner(KarpLubySampler& sampler, Rng& rng, const KarpLubyOptions& opts)
      : sampler_(sampler), rng_(rng), opts_(opts) {}

  double draw() {
    if (++trials_ > opts_.max_trials) {
      throw ResourceError("Karp-Luby exceeds " + std::to_string(opts_.max_trials) + " trials");
    }
    if (opts_.deadline && (trials_ & 0xfff) == 1 && Clock::now() > *opts_.deadline) {
      throw DeadlineExceeded();
    }
    return sampler_.hit(rng_) ? 1.0 : 0.0;
  }

  std::uint64_t trials() const { return trials_; }

 private:
  KarpLubySampler& sampler_;
  Rng& rng_;
  const KarpLubyOptions& opts_;
  std::uint64_t trials_ = 0;
};

std::uint64_t ceil_count(double x) {
  if (!(x < 1e19)) throw ResourceError("Karp-Luby trial count overflows");
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(x)));
}

// Mean of a [0,1] variable, relative error ε with probability 1 − δ.
double approximate_mean(Runner& r, double eps, double delta) {
  const double e2 = std::numbers::e - 2.0;
  const double upsilon = 4.0 * e2 * std::log(2.0 / delta) / (eps * eps);

  // Stopping rule with ε1 = min(1/2, √ε), δ/3.
  const double eps1 = std::min(0.5, std::sqrt(eps));
  const double upsilon1 =
      1.0 + (1.0 + eps1) * 4.0 * e2 * std::log(2.0 / (delta / 3.0)) / (eps1 * eps1);
  double sum = 0.0;
  std::uint64_t n = 0;
  while (sum < upsilon1) {
    sum += r.draw();
    ++n;
  }
  const double mu_hat = upsilon1 / static_cast<double>(n);

  // Variance estimate.
  const double upsilon2 = 2.0 * (1.0 + std::sqrt(eps)) * (1.0 + 2.0 * std::sqrt(eps)) *
                          (1.0 + std::log(1.5) / std::log(2.0 / delta)) * upsilon;
  const auto n2 = ceil_count(upsilon2 * eps / mu_hat);
  double s = 0.0;
  for (std::uint64_t i = 0; i < n2; ++i) {
    const double d = r.draw() - r.draw();
    s += d * d / 2.0;
  }
  const double rho = std::max(s / static_cast<double>(n2), eps * mu_hat);

  const auto n3 = ceil_count(upsilon2 * rho / (mu_hat * mu_hat));
  double hits = 0.0;
  for (std::uint64_t i = 0; i < n3; ++i) hits += r.draw();
  return hits / static_cast<double>(n3);
}

}  // namespace

KarpLubyResult karp_luby_confidence(const WsSet& s, const WorldTable& w,
                                    const KarpLubyOptions& opts) {
  if (!(opts.epsilon > 0.0 && opts.epsilon < 1.0)) {
    throw ValidationError("epsilon must lie in (0, 1)");
  }
  if (!(opts.delta > 0.0 && opts.delta < 1.0)) {
    throw ValidationError("delta must lie in (0, 1)");
  }
  validate(s, w);
  KarpLubyResult out;
  if (s.empty()) return out;
  KarpLubySampler sampler(s, w);
  if (sampler.total_weight() <= 0.0) return out;
  Rng rng(opts.seed);
  Runner runner(sampler, rng, opts);
  double mean = 0.0;
  if (opts.fixed) {
    const auto n = kl_fixed_trials(s.size(), opts.epsilon, opts.delta);
    double hits = 0.0;
    for (std::uint64_t i = 0; i < n; ++i) hits += runner.draw();
    mean = hits / static_cast<double>(n);
  } else {
    mean = approximate_mean(runner, opts.epsilon, opts.delta);
  }
  out.estimate = std::min(1.0, sampler.total_weight() * mean);
  out.iterations = runner.trials();
  return out;
}

}  // namespace wscond
