#include "drestlab/reward.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace drestlab {

std::string_view to_string(RewardVariant v) {
  switch (v) {
    case RewardVariant::drest: return "drest";
    case RewardVariant::default_reward: return "default";
    case RewardVariant::drest_unnormalized: return "drest_unnormalized";
  }
  return "?";
}

RewardVariant parse_reward_variant(std::string_view name) {
  if (name == "drest") return RewardVariant::drest;
  if (name == "default") return RewardVariant::default_reward;
  if (name == "drest_unnormalized") return RewardVariant::drest_unnormalized;
  throw std::invalid_argument("unknown reward variant '" + std::string(name) + "'");
}

void RewardSpec::validate() const {
  if (!(lambda > 0.0 && lambda < 1.0))
    throw std::invalid_argument("lambda must lie strictly between 0 and 1");
  if (clip && !(*clip > 0.0)) throw std::invalid_argument("clip must be positive");
}

MetaLedger::MetaLedger(std::vector<int> lengths)
    : lengths_(std::move(lengths)), counts_(lengths_.size(), 0) {
  if (lengths_.empty()) throw std::invalid_argument("ledger needs at least one length");
}

std::size_t MetaLedger::slot(int length) const {
  const auto it = std::find(lengths_.begin(), lengths_.end(), length);
  if (it == lengths_.end())
    throw std::out_of_range("trajectory-length " + std::to_string(length) + " is not tracked");
  return static_cast<std::size_t>(it - lengths_.begin());
}

int MetaLedger::count(int length) const { return counts_[slot(length)]; }

void MetaLedger::record(int length) {
  ++counts_[slot(length)];
  ++index_;
}

void MetaLedger::reset() {
  std::fill(counts_.begin(), counts_.end(), 0);
  index_ = 1;
}

MetaLedger ledger_update(MetaLedger ledger, int final_length) {
  ledger.record(final_length);
  return ledger;
}

double drest_discount(double lambda, const MetaLedger& ledger, int length) {
  const double exponent =
      static_cast<double>(ledger.count(length)) - static_cast<double>(ledger.index() - 1) / ledger.k();
  return std::pow(lambda, exponent);
}

std::vector<double> mini_episode_rewards(std::span<const CoinEvent> events, int final_length,
                                         const LengthProfile& profile, const MetaLedger& ledger,
                                         const RewardSpec& spec) {
  std::vector<double> rewards(static_cast<std::size_t>(final_length), 0.0);
  if (events.empty()) return rewards;

  double scale = 1.0;
  if (spec.variant != RewardVariant::default_reward) {
    scale = drest_discount(spec.lambda, ledger, final_length);
    if (spec.variant == RewardVariant::drest) {
      const int li = profile.index_of(final_length);
      if (li < 0) throw std::out_of_range("final length missing from the length profile");
      const double m = profile.m[static_cast<std::size_t>(li)];
      if (!(m > 0.0))
        throw std::invalid_argument("invalid profile: m = 0 at length " +
                                    std::to_string(final_length) + " with a coin collected");
      scale /= m;
    }
  }
  for (const auto& e : events) {
    if (e.t < 1 || e.t > final_length) throw std::out_of_range("coin event outside the episode");
    double r = scale * e.value;
    if (spec.clip) r = std::min(r, *spec.clip);
    rewards[static_cast<std::size_t>(e.t - 1)] += r;
  }
  return rewards;
}

}  // namespace drestlab
