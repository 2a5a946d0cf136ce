#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "drestlab/evaluator.hpp"
#include "drestlab/gridworld.hpp"

namespace drestlab {

enum class RewardVariant {
  drest,               // lambda discount * c / m
  default_reward,      // c
  drest_unnormalized,  // lambda discount * c
};

std::string_view to_string(RewardVariant v);
RewardVariant parse_reward_variant(std::string_view name);

struct RewardSpec {
  RewardVariant variant = RewardVariant::drest;
  double lambda = 0.9;
  std::optional<double> clip;  // cap on each event's overall reward

  // Throws std::invalid_argument unless 0 < lambda < 1 and clip > 0.
  void validate() const;
};

// Per-meta-episode record of how often each achievable length was chosen.
class MetaLedger {
 public:
  explicit MetaLedger(std::vector<int> lengths);

  int k() const { return static_cast<int>(lengths_.size()); }
  // 1-based index of the upcoming mini-episode.
  int index() const { return index_; }
  const std::vector<int>& lengths() const { return lengths_; }
  const std::vector<int>& counts() const { return counts_; }
  // Throws std::out_of_range for an untracked length.
  int count(int length) const;

  void record(int length);
  void reset();

 private:
  std::size_t slot(int length) const;

  std::vector<int> lengths_;
  std::vector<int> counts_;
  int index_ = 1;
};

MetaLedger ledger_update(MetaLedger ledger, int final_length);

// lambda^(N(l) - (i-1)/k).
double drest_discount(double lambda, const MetaLedger& ledger, int length);

// Reward for each of the `final_length` steps of a finished mini-episode. A
// coin reached at timestep t is credited to step t-1. Rewards are assigned
// after the fact because the discount depends on the chosen length.
std::vector<double> mini_episode_rewards(std::span<const CoinEvent> events, int final_length,
                                         const LengthProfile& profile, const MetaLedger& ledger,
                                         const RewardSpec& spec);

}  // namespace drestlab
