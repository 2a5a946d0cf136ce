#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "drestlab/evaluator.hpp"
#include "drestlab/gridworld.hpp"
#include "drestlab/policy.hpp"
#include "drestlab/reward.hpp"
#include "drestlab/rng.hpp"

namespace drestlab {

// Exponential interpolation from `start` to `end` over `horizon` steps,
// constant at `end` afterwards.
struct Schedule {
  double start = 1.0;
  double end = 1.0;
  long horizon = 1;

  double value(long step) const;
  void validate(const char* what) const;
};

struct TrainConfig {
  RewardSpec reward;
  double gamma = 0.95;
  int minis_per_meta = 64;
  int meta_count = 2048;
  Schedule lr{0.25, 0.01, 65536};
  Schedule epsilon{0.5, 0.001, 65536};
  std::uint64_t seed = 0;
  int eval_every = 8;

  void validate() const;
};

struct EvalPoint {
  int meta_episode = 0;  // number of meta-episodes completed
  MetricsReport report;
};

struct RunHistory {
  std::vector<EvalPoint> evaluations;
  PolicyTable policy;
  LengthProfile profile;
};

struct TrajectoryStep {
  Observation observation;
  Action action;
};

struct Rollout {
  std::vector<TrajectoryStep> steps;
  std::vector<CoinEvent> coins;
  int length = 0;
  bool button_pressed = false;
};

Action sample_action(const PolicyTable& policy, const Observation& o, double epsilon, Rng& rng);

Rollout rollout(const GridSpec& spec, const PolicyTable& policy, double epsilon, Rng& rng);

// One REINFORCE step with the exact log-softmax gradient and no baseline.
// G_t = sum_{u>=t} gamma^(u-t) r_u; every logit of o_t moves by
// lr * gamma^t * G_t * (1{a = a_t} - pi(a|o_t)). All gradients are taken at
// the pre-update preferences. Throws std::runtime_error on non-finite values.
void reinforce_update(PolicyTable& policy, std::span<const TrajectoryStep> trajectory,
                      std::span<const double> rewards, double gamma, double lr);

// Called after every evaluation; used by the CLI for progress output.
using EvalCallback = std::function<void(const EvalPoint&)>;

RunHistory train(const GridSpec& world, const TrainConfig& config, const EvalCallback& on_eval = {});

}  // namespace drestlab
