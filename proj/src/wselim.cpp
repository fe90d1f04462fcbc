#include "wscond/wselim.hpp"

#include <cmath>

#include "wscond/errors.hpp"
#include "compensated_sum.hpp"

namespace wscond {

using detail::CompensatedSum;

EliminationResult probability_by_elimination(const WsSet& s, const WorldTable& w,
                                             const EliminationOptions& opts) {
  validate(s, w);
  if (s.empty()) return {0.0, 0};
  if (s.has_universal()) return {1.0, 1};
  Budget budget(opts.max_terms, opts.deadline);
  CompensatedSum sum;
  const auto all = s.descriptors();
  for (std::size_t k = 0; k < all.size(); ++k) {
    DiffStream stream(all[k], all.subspan(k + 1), w, opts.diff_cap);
    while (auto d = stream.next()) {
      budget.tick();
      sum.add(descriptor_probability(*d, w));
    }
  }
  return {sum.value(), budget.nodes()};
}

WsSet mutex_rewrite(const WsSet& s, const WorldTable& w, std::uint64_t cap) {
  validate(s, w);
  std::vector<WsDescriptor> out;
  const auto all = s.descriptors();
  for (std::size_t k = 0; k < all.size(); ++k) {
    DiffStream stream(all[k], all.subspan(k + 1), w, cap);
    while (auto d = stream.next()) {
      out.push_back(std::move(*d));
      if (out.size() > cap) {
        throw ResourceError("mutex rewrite exceeds cap of " + std::to_string(cap) +
                            " descriptors");
      }
    }
  }
  return WsSet(std::move(out));
}

}  // namespace wscond
