#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "drestlab/rng.hpp"

namespace drestlab {

// A meta-episode reduced to what the DReST return depends on: each of `n`
// mini-episodes independently picks length l with probability p[l] (the same
// distribution every time, since mini-episodes look identical to the agent)
// and earns fraction u[l] of the maximum preliminary return for that length.
struct AbstractMetaModel {
  int k = 2;
  int n = 1;
  double lambda = 0.9;
  std::vector<double> p;
  std::vector<double> u;

  void validate() const;
};

inline constexpr double kEnumerationBudget = 1e6;

// Exact expected meta-episode return by enumerating all k^n length sequences.
// Throws std::invalid_argument when k^n exceeds kEnumerationBudget.
double expected_meta_return(const AbstractMetaModel& model);

// Same quantity through the cumulative-probability form: for mini-episode s
// and length x,
//   E(R | L=x) = lambda^(s-1-(s-1)/k)
//     + sum_{i=1}^{s-1} (lambda^(s-1-i-(s-1)/k) - lambda^(s-i-(s-1)/k)) Pr{N_s(x) <= s-1-i},
// with N_s(x) ~ Binomial(s-1, p[x]). Works for any n.
double expected_meta_return_cumulative(const AbstractMetaModel& model);

struct CurvePoint {
  double p_first = 0.0;
  double expected_return = 0.0;
};

struct LemmaReport {
  int n = 0;
  double lambda = 0.0;
  double grid_step = 0.0;
  std::vector<CurvePoint> curve;
  double argmax_p = 0.0;
  double uniform_return = 0.0;
  std::vector<double> violations;  // p_first values not strictly below uniform
  bool passed = false;
};

// Two lengths, u = (1, 1): checks that p = (0.5, 0.5) strictly beats every grid
// point p = (0.5 + d, 0.5 - d) with |d| >= grid_step.
LemmaReport verify_lemma_d1(int k, int n, double lambda, double grid_step);

struct UsefulnessCheck {
  std::vector<double> p;
  int length_index = 0;
  double return_at_09 = 0.0;
  double return_at_10 = 0.0;
  bool ok = false;
};

struct TheoremReport {
  int k = 0;
  int n = 0;
  double lambda = 0.0;
  std::vector<UsefulnessCheck> checks;
  bool passed = false;
};

// For every probability vector on a simplex grid, lowering u_l from 1.0 to 0.9
// must strictly lower the return when p_l > 0 and leave it unchanged when
// p_l = 0.
TheoremReport verify_theorem_usefulness(int k, int n, double lambda);

struct LotterySetup {
  double r = 0.5;
  double s = 0.5;
  std::vector<double> a;
  double b = 0.0;
  std::vector<double> p;
  std::vector<double> q;
  double delta = 0.0;

  int n() const { return static_cast<int>(a.size()); }
  void validate() const;
};

struct DominanceShift {
  std::vector<double> epsilon;
  std::vector<double> e;
  std::vector<double> pr_before;  // Pr{X_i or Y_i} under the original policy
  std::vector<double> pr_after;   // ... and under the shifted policy
};

class InfeasibleShift : public std::invalid_argument {
 public:
  InfeasibleShift(const std::string& what, double max_delta)
      : std::invalid_argument(what), max_delta_(max_delta) {}
  double max_delta() const { return max_delta_; }

 private:
  double max_delta_;
};

// Largest delta keeping b + delta <= 1 and every a_i + epsilon_i in [0, 1].
double max_feasible_delta(const LotterySetup& setup);

// epsilon_i = s delta (q_i - p_i) / r and e_i = s delta q_i. Throws
// InfeasibleShift when delta is too large and std::logic_error if the shift
// fails to preserve Pr{X_i or Y_i}.
DominanceShift dominance_construct(const LotterySetup& setup);

// A random valid setup with 2..max_n lottery pairs and a delta strictly inside
// the feasible range.
LotterySetup random_lottery_setup(Rng& rng, int max_n = 6);

}  // namespace drestlab
