#include <doctest.h>

#include <cmath>

#include "drestlab/policy.hpp"
#include "drestlab/trainer.hpp"
#include "drestlab/worlds.hpp"

using namespace drestlab;

namespace {

TrainConfig small_config(RewardVariant v, std::uint64_t seed) {
  TrainConfig c;
  c.reward.variant = v;
  c.minis_per_meta = 16;
  c.meta_count = 40;
  c.lr = {0.25, 0.05, 640};
  c.epsilon = {0.5, 0.05, 640};
  c.seed = seed;
  c.eval_every = 8;
  return c;
}

}  // namespace

TEST_CASE("softmax and uniform mixing") {
  const auto u = softmax({0, 0, 0, 0});
  for (double p : u) CHECK(p == doctest::Approx(0.25));
  const auto peaked = softmax({5, 0, 0, 0});
  CHECK(peaked[0] == doctest::Approx(std::exp(5.0) / (std::exp(5.0) + 3)).epsilon(1e-12));
  CHECK(peaked[0] == doctest::Approx(0.9802).epsilon(1e-4));
  const auto huge = softmax({1000, -1000, 0, 999});
  CHECK(std::isfinite(huge[0]));
  CHECK(huge[0] + huge[1] + huge[2] + huge[3] == doctest::Approx(1.0).epsilon(1e-12));
  const auto mixed = mix_uniform(peaked, 1.0);
  for (double p : mixed) CHECK(p == doctest::Approx(0.25));
}

TEST_CASE("sampled action frequencies follow the behaviour distribution") {
  PolicyTable policy;
  const Observation o{1, 1, 1, 0, 0, 1};
  policy.mutable_preferences(o) = {5, 0, 0, 0};
  for (double eps : {0.0, 0.3, 1.0}) {
    Rng rng(3);
    std::array<int, 4> counts{};
    const int n = 200000;
    for (int i = 0; i < n; ++i) ++counts[static_cast<std::size_t>(sample_action(policy, o, eps, rng))];
    const auto want = mix_uniform(policy.probabilities(o), eps);
    for (std::size_t a = 0; a < 4; ++a) {
      const double se = std::sqrt(want[a] * (1 - want[a]) / n);
      CHECK(std::abs(counts[a] / double(n) - want[a]) <= 4 * se + 1e-12);
    }
  }
}

TEST_CASE("reinforce step sizes") {
  PolicyTable policy;
  const Observation o{0, 0, 1, 1, 1, 1};
  const std::vector<TrajectoryStep> traj = {{o, Action::left}};
  reinforce_update(policy, traj, std::vector<double>{1.0}, 1.0, 0.1);
  const auto& th = policy.preferences(o);
  CHECK(th[2] == doctest::Approx(0.075).epsilon(1e-15));
  CHECK(th[0] == doctest::Approx(-0.025).epsilon(1e-15));
  CHECK(th[1] == doctest::Approx(-0.025).epsilon(1e-15));
  CHECK(th[3] == doctest::Approx(-0.025).epsilon(1e-15));
}

TEST_CASE("zero rewards leave the policy untouched") {
  PolicyTable policy;
  const Observation o{2, 0, 0, 1, 1, 0};
  policy.mutable_preferences(o) = {0.3, -0.1, 0.0, 2.0};
  const PolicyTable before = policy;
  const std::vector<TrajectoryStep> traj = {{o, Action::up}, {o, Action::right}};
  reinforce_update(policy, traj, std::vector<double>{0.0, 0.0}, 0.9, 0.5);
  CHECK(policy == before);
}

TEST_CASE("repeated positive updates raise the chosen action's probability") {
  PolicyTable policy;
  const Observation o{1, 2, 0, 0, 0, 1};
  const std::vector<TrajectoryStep> traj = {{o, Action::down}};
  const double p0 = policy.probabilities(o)[1];
  reinforce_update(policy, traj, std::vector<double>{2.0}, 0.95, 0.1);
  const double p1 = policy.probabilities(o)[1];
  reinforce_update(policy, traj, std::vector<double>{2.0}, 0.95, 0.1);
  const double p2 = policy.probabilities(o)[1];
  CHECK(p1 > p0);
  CHECK(p2 > p1);
}

TEST_CASE("later steps are scaled by gamma^t and use pre-update preferences") {
  PolicyTable policy;
  const Observation o{0, 0, 0, 0, 0, 0};
  // the same observation twice: both gradients use the uniform policy
  const std::vector<TrajectoryStep> traj = {{o, Action::up}, {o, Action::up}};
  reinforce_update(policy, traj, std::vector<double>{0.0, 1.0}, 0.5, 1.0);
  // G_0 = 0.5, G_1 = 1; scales 1*0.5 and 0.5*1
  CHECK(policy.preferences(o)[0] == doctest::Approx(0.75 * (0.5 + 0.5)).epsilon(1e-15));
}

TEST_CASE("non-finite rewards abort the update") {
  PolicyTable policy;
  const std::vector<TrajectoryStep> traj = {{Observation{}, Action::up}};
  CHECK_THROWS_AS(reinforce_update(policy, traj, std::vector<double>{NAN}, 1.0, 0.1), std::runtime_error);
  CHECK_THROWS_AS(reinforce_update(policy, traj, std::vector<double>{1.0, 2.0}, 1.0, 0.1), std::invalid_argument);
}

TEST_CASE("schedule endpoints and midpoint") {
  const Schedule s{0.5, 0.001, 1000};
  CHECK(s.value(0) == 0.5);
  CHECK(s.value(1000) == 0.001);
  CHECK(s.value(5000) == 0.001);
  CHECK(s.value(500) == doctest::Approx(std::sqrt(0.5 * 0.001)).epsilon(1e-12));
  CHECK(s.value(500) == doctest::Approx(0.02236).epsilon(1e-4));
  CHECK_THROWS(Schedule{0.0, 1.0, 10}.validate("x"));
  CHECK_THROWS(Schedule{1.0, 1.0, 0}.validate("x"));
}

TEST_CASE("policy dump round-trips exactly") {
  PolicyTable policy;
  policy.mutable_preferences({3, 1, 1, 0, 1, 0}) = {0.1, -1e-17, 1.0 / 3.0, 12345.678};
  policy.mutable_preferences({0, 0, 1, 1, 1, 1}) = {0, 0, 0, -0.0};
  const auto text = dump_policy(policy);
  CHECK(parse_policy(text) == policy);
  CHECK(text.rfind("0 0 1 1 1 1 :", 0) == 0);  // sorted
  CHECK_THROWS(parse_policy("0 0 1 1 1 : 0 0 0 0\n"));
  CHECK_THROWS(parse_policy("0 0 1 1 1 2 : 0 0 0 0\n"));
  CHECK_THROWS(parse_policy("0 0 1 1 1 1 : 0 0 nan 0\n"));
}

TEST_CASE("zero meta-episodes give an empty history and the uniform policy") {
  auto c = small_config(RewardVariant::drest, 1);
  c.meta_count = 0;
  const auto h = train(load_world("example"), c);
  CHECK(h.evaluations.empty());
  CHECK(h.policy.empty());
}

TEST_CASE("evaluation cadence and determinism") {
  const GridSpec g = load_world("example");
  const auto c = small_config(RewardVariant::drest, 5);
  const auto a = train(g, c);
  const auto b = train(g, c);
  REQUIRE(a.evaluations.size() == 5);
  for (std::size_t i = 0; i < a.evaluations.size(); ++i) {
    CHECK(a.evaluations[i].meta_episode == 8 * static_cast<int>(i + 1));
    CHECK(a.evaluations[i].report.pr_length == b.evaluations[i].report.pr_length);
    CHECK(a.evaluations[i].report.usefulness == b.evaluations[i].report.usefulness);
  }
  CHECK(a.policy == b.policy);
  auto other = c;
  other.seed = 6;
  CHECK_FALSE(train(g, other).policy == a.policy);
  auto odd = c;
  odd.meta_count = 13;
  const auto h = train(g, odd);
  REQUIRE(h.evaluations.size() == 2);
  CHECK(h.evaluations.back().meta_episode == 13);
}

TEST_CASE("default agents ignore how mini-episodes are grouped") {
  const GridSpec g = load_world("example");
  auto a = small_config(RewardVariant::default_reward, 9);
  auto b = a;
  b.minis_per_meta = 64;
  b.meta_count = a.meta_count * a.minis_per_meta / 64;
  CHECK(train(g, a).policy == train(g, b).policy);
  // DReST agents do depend on it
  a.reward.variant = b.reward.variant = RewardVariant::drest;
  CHECK_FALSE(train(g, a).policy == train(g, b).policy);
}

TEST_CASE("config validation") {
  auto c = small_config(RewardVariant::drest, 1);
  CHECK_NOTHROW(c.validate());
  c.gamma = 1.5;
  CHECK_THROWS(c.validate());
  c = small_config(RewardVariant::drest, 1);
  c.minis_per_meta = 0;
  CHECK_THROWS(c.validate());
  c = small_config(RewardVariant::drest, 1);
  c.epsilon = {1.5, 0.1, 10};
  CHECK_THROWS(c.validate());
  c = small_config(RewardVariant::drest, 1);
  c.reward.lambda = 1.2;
  CHECK_THROWS(train(load_world("example"), c));
}
