#include "drestlab/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

namespace drestlab {

double Schedule::value(long step) const {
  const double frac = std::clamp(static_cast<double>(step) / static_cast<double>(horizon), 0.0, 1.0);
  if (frac >= 1.0) return end;
  return start * std::pow(end / start, frac);
}

void Schedule::validate(const char* what) const {
  if (!(start > 0.0) || !(end > 0.0) || horizon < 1)
    throw std::invalid_argument(std::string(what) + " schedule needs start, end > 0 and horizon >= 1");
}

void TrainConfig::validate() const {
  reward.validate();
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in (0, 1]");
  if (minis_per_meta < 1) throw std::invalid_argument("minis_per_meta must be >= 1");
  if (meta_count < 0) throw std::invalid_argument("meta_count must be >= 0");
  if (eval_every < 1) throw std::invalid_argument("eval_every must be >= 1");
  lr.validate("learning-rate");
  epsilon.validate("epsilon");
  if (epsilon.start > 1.0 || epsilon.end > 1.0) throw std::invalid_argument("epsilon must be <= 1");
}

Action sample_action(const PolicyTable& policy, const Observation& o, double epsilon, Rng& rng) {
  if (rng.uniform() < epsilon) return kAllActions[static_cast<std::size_t>(rng.below(kNumActions))];
  const auto probs = policy.probabilities(o);
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t a = 0; a + 1 < probs.size(); ++a) {
    acc += probs[a];
    if (u < acc) return kAllActions[a];
  }
  return kAllActions.back();
}

Rollout rollout(const GridSpec& spec, const PolicyTable& policy, double epsilon, Rng& rng) {
  Rollout out;
  EnvState s = initial_state(spec);
  out.steps.reserve(static_cast<std::size_t>(spec.long_horizon()));
  while (!s.done()) {
    const Observation o = observe(s);
    const Action a = sample_action(policy, o, epsilon, rng);
    auto [next, events] = step(spec, s, a);
    out.steps.push_back({o, a});
    if (events.coin) out.coins.push_back(*events.coin);
    out.button_pressed = out.button_pressed || events.button_pressed;
    s = next;
  }
  out.length = s.horizon;
  return out;
}

void reinforce_update(PolicyTable& policy, std::span<const TrajectoryStep> trajectory,
                      std::span<const double> rewards, double gamma, double lr) {
  if (trajectory.size() != rewards.size())
    throw std::invalid_argument("trajectory and rewards differ in length");
  for (double r : rewards)
    if (!std::isfinite(r)) throw std::runtime_error("non-finite reward in REINFORCE update");

  const std::size_t n = trajectory.size();
  std::vector<double> returns(n, 0.0);
  double g = 0.0;
  for (std::size_t t = n; t-- > 0;) {
    g = rewards[t] + gamma * g;
    returns[t] = g;
  }

  std::map<std::uint32_t, Preferences> deltas;
  double discount = 1.0;
  for (std::size_t t = 0; t < n; ++t, discount *= gamma) {
    const double scale = lr * discount * returns[t];
    if (scale == 0.0) continue;
    const auto& o = trajectory[t].observation;
    const auto probs = policy.probabilities(o);
    auto& d = deltas[o.pack()];
    const auto taken = static_cast<std::size_t>(trajectory[t].action);
    for (std::size_t a = 0; a < kNumActions; ++a) d[a] += scale * ((a == taken ? 1.0 : 0.0) - probs[a]);
  }
  for (const auto& [key, d] : deltas) {
    auto& theta = policy.mutable_preferences(Observation::unpack(key));
    for (std::size_t a = 0; a < kNumActions; ++a) {
      theta[a] += d[a];
      if (!std::isfinite(theta[a]))
        throw std::runtime_error("non-finite action preference after REINFORCE update");
    }
  }
}

RunHistory train(const GridSpec& world, const TrainConfig& config, const EvalCallback& on_eval) {
  config.validate();
  RunHistory history;
  history.profile = make_length_profile(world, config.gamma);
  const auto& profile = history.profile;

  Rng rng(config.seed);
  MetaLedger ledger(profile.lengths);
  long mini = 0;
  std::vector<double> rewards;

  auto evaluate = [&](int completed) {
    EvalPoint point{completed, exact_eval(world, history.policy, 0.0, profile)};
    if (on_eval) on_eval(point);
    history.evaluations.push_back(std::move(point));
  };

  for (int meta = 0; meta < config.meta_count; ++meta) {
    ledger.reset();
    for (int i = 0; i < config.minis_per_meta; ++i, ++mini) {
      const double eps = config.epsilon.value(mini);
      const double lr = config.lr.value(mini);
      const Rollout r = rollout(world, history.policy, eps, rng);
      rewards = mini_episode_rewards(r.coins, r.length, profile, ledger, config.reward);
      reinforce_update(history.policy, r.steps, rewards, config.gamma, lr);
      ledger.record(r.length);
    }
    const int completed = meta + 1;
    if (completed % config.eval_every == 0 || completed == config.meta_count) evaluate(completed);
  }
  return history;
}

}  // namespace drestlab
