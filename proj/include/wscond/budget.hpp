#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <optional>

namespace wscond {

using Clock = std::chrono::steady_clock;

// Node cap and optional deadline shared by one exact computation. Counting is
// atomic so that concurrently evaluated subproblems draw from the same budget.
class Budget {
 public:
  explicit Budget(std::uint64_t max_nodes,
                  std::optional<Clock::time_point> deadline = std::nullopt)
      : max_nodes_(max_nodes), deadline_(deadline) {}

  // Counts one visited subproblem; throws ResourceError past the cap or deadline.
  void tick();

  std::uint64_t nodes() const { return nodes_.load(std::memory_order_relaxed); }

 private:
  std::uint64_t max_nodes_;
  std::optional<Clock::time_point> deadline_;
  std::atomic<std::uint64_t> nodes_{0};
};

}  // namespace wscond
