#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "drestlab/gridworld.hpp"

namespace drestlab {

using Preferences = std::array<double, kNumActions>;
using ActionProbs = std::array<double, kNumActions>;

// Numerically stable softmax over four action preferences.
ActionProbs softmax(const Preferences& theta);

// Behaviour distribution: (1 - epsilon) * softmax + epsilon * uniform.
ActionProbs mix_uniform(const ActionProbs& probs, double epsilon);

// Tabular action preferences keyed by observation. Unseen observations have
// all-zero preferences, i.e. the uniform policy.
class PolicyTable {
 public:
  const Preferences& preferences(const Observation& o) const;
  Preferences& mutable_preferences(const Observation& o) { return table_[o.pack()]; }
  ActionProbs probabilities(const Observation& o) const { return softmax(preferences(o)); }

  std::size_t size() const { return table_.size(); }
  bool empty() const { return table_.empty(); }

  // Entries sorted by observation (lexicographic on x, y, c1, c2, c3, b).
  std::vector<std::pair<Observation, Preferences>> entries() const;

  bool operator==(const PolicyTable& other) const;

 private:
  std::unordered_map<std::uint32_t, Preferences> table_;
};

// One line per observation: `x y c1 c2 c3 b : up down left right`.
// Preferences are written in shortest round-trip form, so parsing a dump
// reproduces the table exactly.
std::string dump_policy(const PolicyTable& policy);
PolicyTable parse_policy(std::string_view text);

}  // namespace drestlab
