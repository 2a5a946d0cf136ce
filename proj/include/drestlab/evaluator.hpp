#pragma once

#include <span>
#include <string>
#include <vector>

#include "drestlab/gridworld.hpp"
#include "drestlab/policy.hpp"

namespace drestlab {

// Achievable trajectory-lengths with the best gamma-discounted coin total
// attainable at each.
struct LengthProfile {
  std::vector<int> lengths;
  std::vector<double> m;
  double gamma = 1.0;

  int k() const { return static_cast<int>(lengths.size()); }
  // Index of `length` in `lengths`, or -1.
  int index_of(int length) const;
};

// Maximum over action sequences of sum_t gamma^t * c_t among sequences whose
// final trajectory-length is `length` (t is the timestep a coin is reached).
// Throws std::invalid_argument when `length` is not achievable.
double max_discounted_coins(const GridSpec& spec, int length, double gamma);

LengthProfile make_length_profile(const GridSpec& spec, double gamma);

struct MetricsReport {
  std::vector<int> lengths;
  std::vector<double> pr_length;
  std::vector<double> exp_coins;  // E(C | L = l), gamma-discounted; 0 when Pr = 0
  double usefulness = 0.0;
  double neutrality = 0.0;

  double pr(int length) const;
};

// Exact forward propagation of the state distribution under the behaviour
// policy (1 - epsilon) * softmax + epsilon * uniform.
MetricsReport exact_eval(const GridSpec& spec, const PolicyTable& policy, double epsilon,
                         const LengthProfile& profile);
MetricsReport exact_eval(const GridSpec& spec, const PolicyTable& policy, double epsilon,
                         double gamma);

// sum_l Pr{L=l} * E(C|L=l) / m_l. A length with m_l = 0 contributes 0 when no
// coins are expected there; expected coins against m_l = 0 is an error.
double usefulness(std::span<const double> pr_length, std::span<const double> exp_coins,
                  const LengthProfile& profile);

// Shannon entropy in bits; zero-probability terms are dropped.
double neutrality(std::span<const double> pr_length);

std::string metrics_csv_header(const std::vector<int>& lengths);
std::string metrics_csv_row(const std::string& run_id, int meta_episode,
                            const MetricsReport& report);

inline constexpr int kCsvSchemaVersion = 1;

}  // namespace drestlab
