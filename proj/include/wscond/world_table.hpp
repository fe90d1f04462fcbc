#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace wscond {

// Dense variable index into a WorldTable.
using VarId = std::uint32_t;
// Dense index into a variable's domain; the printed label is interned in the table.
using ValueIdx = std::uint32_t;

inline constexpr double kWeightTolerance = 1e-9;

// The world-table W: independent finite random variables, their domains and
// per-alternative weights. Variables are only ever appended.
class WorldTable {
 public:
  struct Variable {
    std::string name;
    std::vector<std::string> labels;
    std::vector<double> probs;
  };

  WorldTable() = default;

  // Appends a variable. Throws ValidationError on duplicate names or labels,
  // empty domains, negative weights, or weights not summing to 1 within 1e-9.
  VarId add_variable(std::string name, std::vector<std::string> labels,
                     std::vector<double> probs);

  std::size_t size() const { return vars_.size(); }
  bool empty() const { return vars_.empty(); }

  const Variable& variable(VarId v) const { return vars_.at(v); }
  const std::string& name(VarId v) const { return vars_.at(v).name; }
  std::size_t domain_size(VarId v) const { return vars_.at(v).labels.size(); }
  double prob(VarId v, ValueIdx i) const { return vars_.at(v).probs.at(i); }
  const std::string& label(VarId v, ValueIdx i) const {
    return vars_.at(v).labels.at(i);
  }
  std::span<const double> probs(VarId v) const { return vars_.at(v).probs; }

  std::optional<VarId> find(std::string_view name) const;
  std::optional<ValueIdx> find_value(VarId v, std::string_view label) const;

  // Throwing lookups used by parsers.
  VarId require(std::string_view name) const;
  ValueIdx require_value(VarId v, std::string_view label) const;

  bool contains(VarId v) const { return v < vars_.size(); }
  bool valid(VarId v, ValueIdx i) const {
    return v < vars_.size() && i < vars_[v].labels.size();
  }

  // Product of domain sizes, saturating at UINT64_MAX.
  std::uint64_t world_count() const;

  friend bool operator==(const WorldTable& a, const WorldTable& b);

 private:
  std::vector<Variable> vars_;
  std::unordered_map<std::string, VarId> by_name_;
};

// Default names/labels check: identifiers may not contain the separators used
// by the textual descriptor form.
bool is_valid_token(std::string_view s);

}  // namespace wscond
