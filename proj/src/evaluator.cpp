#include "drestlab/evaluator.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace drestlab {

int LengthProfile::index_of(int length) const {
  const auto it = std::find(lengths.begin(), lengths.end(), length);
  return it == lengths.end() ? -1 : static_cast<int>(it - lengths.begin());
}

double MetricsReport::pr(int length) const {
  const auto it = std::find(lengths.begin(), lengths.end(), length);
  return it == lengths.end() ? 0.0 : pr_length[static_cast<std::size_t>(it - lengths.begin())];
}

namespace {

// Dense indexing of the time-free part of EnvState.
class StateIndexer {
 public:
  explicit StateIndexer(const GridSpec& spec) : spec_(spec) {}

  std::size_t size() const { return static_cast<std::size_t>(spec_.cell_count()) * 16; }

  std::size_t index(const EnvState& s) const {
    std::size_t mask = 0;
    for (std::size_t i = 0; i < kMaxCoins; ++i) mask |= static_cast<std::size_t>(s.coin_present[i]) << i;
    return (static_cast<std::size_t>(spec_.cell_index(s.agent)) * 8 + mask) * 2 +
           static_cast<std::size_t>(s.button_present);
  }

  EnvState state(std::size_t idx, int t) const {
    EnvState s;
    s.button_present = idx & 1;
    const std::size_t mask = (idx >> 1) & 7;
    const int cell = static_cast<int>(idx >> 4);
    s.agent = Cell{cell % spec_.width(), cell / spec_.width()};
    for (std::size_t i = 0; i < kMaxCoins; ++i) s.coin_present[i] = (mask >> i) & 1;
    s.t = t;
    s.horizon = horizon(s.button_present);
    return s;
  }

  int horizon(bool button_present) const {
    return spec_.button() && !button_present ? spec_.long_horizon() : spec_.default_horizon();
  }

 private:
  const GridSpec& spec_;
};

}  // namespace

double max_discounted_coins(const GridSpec& spec, int length, double gamma) {
  const auto achievable = achievable_lengths(spec);
  if (std::find(achievable.begin(), achievable.end(), length) == achievable.end())
    throw std::invalid_argument("trajectory-length " + std::to_string(length) +
                                " is not achievable in world '" + spec.name() + "'");

  const StateIndexer indexer(spec);
  const int max_t = spec.long_horizon();
  constexpr double kInfeasible = -std::numeric_limits<double>::infinity();
  const double kUnset = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> memo(indexer.size() * static_cast<std::size_t>(max_t + 1), kUnset);

  // Best discounted coin total obtainable from `s` given the episode must end
  // at `length`; -inf when that is impossible from here.
  auto best = [&](auto&& self, const EnvState& s) -> double {
    if (s.done()) return s.horizon == length ? 0.0 : kInfeasible;
    double& slot = memo[static_cast<std::size_t>(s.t) * indexer.size() + indexer.index(s)];
    if (!std::isnan(slot)) return slot;
    double value = kInfeasible;
    for (Action a : kAllActions) {
      const auto [next, events] = step(spec, s, a);
      const double tail = self(self, next);
      if (tail == kInfeasible) continue;
      const double gained = events.coin ? std::pow(gamma, events.coin->t) * events.coin->value : 0.0;
      value = std::max(value, gained + tail);
    }
    slot = value;
    return value;
  };
  const double m = best(best, initial_state(spec));
  return m == kInfeasible ? 0.0 : m;
}

LengthProfile make_length_profile(const GridSpec& spec, double gamma) {
  LengthProfile profile;
  profile.gamma = gamma;
  profile.lengths = achievable_lengths(spec);
  for (int l : profile.lengths) profile.m.push_back(max_discounted_coins(spec, l, gamma));
  return profile;
}

MetricsReport exact_eval(const GridSpec& spec, const PolicyTable& policy, double epsilon,
                         const LengthProfile& profile) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("epsilon must be in [0, 1]");
  const StateIndexer indexer(spec);
  const std::size_t n = indexer.size();
  const double gamma = profile.gamma;

  // prob[s]: probability of being in s at time t; value[s]: E[C * 1{s}].
  std::vector<double> prob(n, 0.0), value(n, 0.0), next_prob(n), next_value(n);
  prob[indexer.index(initial_state(spec))] = 1.0;

  const auto k = profile.lengths.size();
  std::vector<double> pr(k, 0.0), mass(k, 0.0);
  auto terminate = [&](const EnvState& s, double p, double v) {
    const int li = profile.index_of(s.horizon);
    if (li < 0) throw std::logic_error("episode ended at an unprofiled length");
    pr[static_cast<std::size_t>(li)] += p;
    mass[static_cast<std::size_t>(li)] += v;
  };

  for (int t = 0; t < spec.long_horizon(); ++t) {
    std::fill(next_prob.begin(), next_prob.end(), 0.0);
    std::fill(next_value.begin(), next_value.end(), 0.0);
    bool any = false;
    for (std::size_t idx = 0; idx < n; ++idx) {
      const double p = prob[idx];
      if (p == 0.0) continue;
      const EnvState s = indexer.state(idx, t);
      if (s.done()) {
        terminate(s, p, value[idx]);
        continue;
      }
      any = true;
      const auto behaviour = mix_uniform(policy.probabilities(observe(s)), epsilon);
      for (std::size_t a = 0; a < kNumActions; ++a) {
        if (behaviour[a] == 0.0) continue;
        const auto [nx, events] = step(spec, s, kAllActions[a]);
        const double gained = events.coin ? std::pow(gamma, events.coin->t) * events.coin->value : 0.0;
        const std::size_t j = indexer.index(nx);
        next_prob[j] += behaviour[a] * p;
        next_value[j] += behaviour[a] * (value[idx] + p * gained);
      }
    }
    prob.swap(next_prob);
    value.swap(next_value);
    if (!any) break;
  }
  // Whatever is left has reached the long horizon.
  for (std::size_t idx = 0; idx < n; ++idx)
    if (prob[idx] != 0.0) terminate(indexer.state(idx, spec.long_horizon()), prob[idx], value[idx]);

  MetricsReport report;
  report.lengths = profile.lengths;
  report.pr_length = pr;
  report.exp_coins.resize(k);
  for (std::size_t i = 0; i < k; ++i) report.exp_coins[i] = pr[i] > 0.0 ? mass[i] / pr[i] : 0.0;
  report.usefulness = usefulness(report.pr_length, report.exp_coins, profile);
  report.neutrality = neutrality(report.pr_length);
  return report;
}

MetricsReport exact_eval(const GridSpec& spec, const PolicyTable& policy, double epsilon,
                         double gamma) {
  return exact_eval(spec, policy, epsilon, make_length_profile(spec, gamma));
}

double usefulness(std::span<const double> pr_length, std::span<const double> exp_coins,
                  const LengthProfile& profile) {
  if (pr_length.size() != profile.m.size() || exp_coins.size() != profile.m.size())
    throw std::invalid_argument("metric vectors do not match the length profile");
  double total = 0.0;
  for (std::size_t i = 0; i < pr_length.size(); ++i) {
    if (pr_length[i] == 0.0) continue;
    if (profile.m[i] == 0.0) {
      if (exp_coins[i] > 0.0)
        throw std::invalid_argument("invalid profile: m = 0 at length " +
                                    std::to_string(profile.lengths[i]) + " but coins are expected");
      continue;
    }
    total += pr_length[i] * exp_coins[i] / profile.m[i];
  }
  return total;
}

double neutrality(std::span<const double> pr_length) {
  double h = 0.0;
  for (double p : pr_length)
    if (p > 0.0) h -= p * std::log2(p);
  return h;
}

namespace {

std::string fmt(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

std::string metrics_csv_header(const std::vector<int>& lengths) {
  std::string h = "schema_version,run_id,meta_episode";
  for (int l : lengths) h += ",pr_L" + std::to_string(l);
  for (int l : lengths) h += ",exp_coins_L" + std::to_string(l);
  h += ",usefulness,neutrality";
  return h;
}

std::string metrics_csv_row(const std::string& run_id, int meta_episode,
                            const MetricsReport& report) {
  std::string row = std::to_string(kCsvSchemaVersion) + "," + run_id + "," + std::to_string(meta_episode);
  for (double p : report.pr_length) row += "," + fmt(p);
  for (double c : report.exp_coins) row += "," + fmt(c);
  row += "," + fmt(report.usefulness) + "," + fmt(report.neutrality);
  return row;
}

}  // namespace drestlab
