#include "wscond/world_table.hpp"

#include <cmath>
#include <limits>
#include <unordered_set>

#include "wscond/errors.hpp"

namespace wscond {

bool is_valid_token(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    switch (c) {
      case '{': case '}': case '=': case ';': case ',': case '"':
      case ' ': case '\t': case '\n': case '\r': case '@':
        return false;
      default:
        break;
    }
  }
  return true;
}

VarId WorldTable::add_variable(std::string name, std::vector<std::string> labels,
                               std::vector<double> probs) {
  if (!is_valid_token(name)) {
    throw ValidationError("invalid variable name '" + name + "'");
  }
  if (by_name_.count(name) != 0) {
    throw ValidationError("duplicate variable '" + name + "'");
  }
  if (labels.empty()) {
    throw ValidationError("variable '" + name + "' has an empty domain");
  }
  if (labels.size() != probs.size()) {
    throw ValidationError("variable '" + name + "': label/weight count mismatch");
  }
  std::unordered_set<std::string> seen;
  double sum = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!is_valid_token(labels[i])) {
      throw ValidationError("variable '" + name + "': invalid value '" + labels[i] + "'");
    }
    if (!seen.insert(labels[i]).second) {
      throw ValidationError("variable '" + name + "': duplicate value '" + labels[i] + "'");
    }
    if (!(probs[i] >= 0.0) || probs[i] > 1.0 + kWeightTolerance) {
      throw ValidationError("variable '" + name + "': weight out of [0,1]");
    }
    sum += probs[i];
  }
  if (std::abs(sum - 1.0) > kWeightTolerance) {
    throw ValidationError("variable '" + name + "': weights sum to " +
                          std::to_string(sum) + ", expected 1");
  }
  const auto id = static_cast<VarId>(vars_.size());
  by_name_.emplace(name, id);
  vars_.push_back({std::move(name), std::move(labels), std::move(probs)});
  return id;
}

std::optional<VarId> WorldTable::find(std::string_view name) const {
  auto it = by_name_.find(std::string(name));
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

std::optional<ValueIdx> WorldTable::find_value(VarId v, std::string_view label) const {
  const auto& labels = vars_.at(v).labels;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == label) return static_cast<ValueIdx>(i);
  }
  return std::nullopt;
}

VarId WorldTable::require(std::string_view name) const {
  auto v = find(name);
  if (!v) throw ValidationError("unknown variable '" + std::string(name) + "'");
  return *v;
}

ValueIdx WorldTable::require_value(VarId v, std::string_view label) const {
  auto i = find_value(v, label);
  if (!i) {
    throw ValidationError("value '" + std::string(label) + "' not in domain of '" +
                          name(v) + "'");
  }
  return *i;
}

std::uint64_t WorldTable::world_count() const {
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t n = 1;
  for (const auto& v : vars_) {
    const std::uint64_t k = v.labels.size();
    if (n > kMax / k) return kMax;
    n *= k;
  }
  return n;
}

bool operator==(const WorldTable& a, const WorldTable& b) {
  if (a.vars_.size() != b.vars_.size()) return false;
  for (std::size_t i = 0; i < a.vars_.size(); ++i) {
    const auto& x = a.vars_[i];
    const auto& y = b.vars_[i];
    if (x.name != y.name || x.labels != y.labels || x.probs != y.probs) return false;
  }
  return true;
}

}  // namespace wscond
