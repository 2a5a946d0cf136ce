#include "drestlab/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace drestlab {

namespace {

bool sums_to_one(const std::vector<double>& v) {
  return std::abs(std::accumulate(v.begin(), v.end(), 0.0) - 1.0) <= 1e-9;
}

}  // namespace

void AbstractMetaModel::validate() const {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  if (!(lambda > 0.0 && lambda < 1.0)) throw std::invalid_argument("lambda must lie in (0, 1)");
  if (p.size() != static_cast<std::size_t>(k) || u.size() != static_cast<std::size_t>(k))
    throw std::invalid_argument("p and u must have k entries");
  for (double x : p)
    if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("p entries must lie in [0, 1]");
  if (!sums_to_one(p)) throw std::invalid_argument("p must sum to 1");
  for (double x : u)
    if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("u entries must lie in [0, 1]");
}

double expected_meta_return(const AbstractMetaModel& model) {
  model.validate();
  if (std::pow(static_cast<double>(model.k), model.n) > kEnumerationBudget)
    throw std::invalid_argument("k^n exceeds the enumeration budget");

  const double k = model.k;
  std::vector<int> counts(static_cast<std::size_t>(model.k), 0);
  double total = 0.0;
  // Depth-first over length sequences; zero-probability branches are skipped.
  auto walk = [&](auto&& self, int i, double prob, double ret) -> void {
    if (i == model.n) {
      total += prob * ret;
      return;
    }
    for (std::size_t l = 0; l < counts.size(); ++l) {
      if (model.p[l] == 0.0) continue;
      const double discount = std::pow(model.lambda, counts[l] - i / k);
      ++counts[l];
      self(self, i + 1, prob * model.p[l], ret + discount * model.u[l]);
      --counts[l];
    }
  };
  walk(walk, 0, 1.0, 0.0);
  return total;
}

namespace {

// Pr{X <= j} for X ~ Binomial(m, p), for j = 0..m.
std::vector<double> binomial_cdf(int m, double p) {
  std::vector<double> cdf(static_cast<std::size_t>(m) + 1, 0.0);
  double acc = 0.0;
  for (int j = 0; j <= m; ++j) {
    double pmf = 0.0;
    if (p == 0.0) {
      pmf = j == 0 ? 1.0 : 0.0;
    } else if (p == 1.0) {
      pmf = j == m ? 1.0 : 0.0;
    } else {
      pmf = std::exp(std::lgamma(m + 1.0) - std::lgamma(j + 1.0) - std::lgamma(m - j + 1.0) +
                     j * std::log(p) + (m - j) * std::log1p(-p));
    }
    acc += pmf;
    cdf[static_cast<std::size_t>(j)] = std::min(acc, 1.0);
  }
  return cdf;
}

}  // namespace

double expected_meta_return_cumulative(const AbstractMetaModel& model) {
  model.validate();
  const double k = model.k;
  const double lam = model.lambda;
  double total = 0.0;
  for (int s = 1; s <= model.n; ++s) {
    const double shift = (s - 1) / k;
    for (std::size_t x = 0; x < model.p.size(); ++x) {
      if (model.p[x] == 0.0) continue;
      const auto cdf = binomial_cdf(s - 1, model.p[x]);
      double conditional = std::pow(lam, (s - 1) - shift);
      for (int i = 1; i <= s - 1; ++i) {
        const double step = std::pow(lam, (s - 1 - i) - shift) - std::pow(lam, (s - i) - shift);
        conditional += step * cdf[static_cast<std::size_t>(s - 1 - i)];
      }
      total += model.p[x] * model.u[x] * conditional;
    }
  }
  return total;
}

namespace {

double meta_return(const AbstractMetaModel& model) {
  if (std::pow(static_cast<double>(model.k), model.n) <= kEnumerationBudget)
    return expected_meta_return(model);
  return expected_meta_return_cumulative(model);
}

}  // namespace

LemmaReport verify_lemma_d1(int k, int n, double lambda, double grid_step) {
  if (k != 2) throw std::invalid_argument("the pairwise lemma check needs k = 2");
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  if (!(lambda > 0.0 && lambda < 1.0)) throw std::invalid_argument("lambda must lie in (0, 1)");
  if (!(grid_step > 0.0 && grid_step <= 0.5)) throw std::invalid_argument("grid_step must lie in (0, 0.5]");

  LemmaReport report;
  report.n = n;
  report.lambda = lambda;
  report.grid_step = grid_step;
  const int points = static_cast<int>(std::llround(1.0 / grid_step));
  AbstractMetaModel model{2, n, lambda, {0.5, 0.5}, {1.0, 1.0}};
  report.uniform_return = meta_return(model);

  double best = -1.0;
  for (int j = 0; j <= points; ++j) {
    const double p1 = std::min(1.0, j * grid_step);
    model.p = {p1, 1.0 - p1};
    const double ret = meta_return(model);
    report.curve.push_back({p1, ret});
    if (ret > best) {
      best = ret;
      report.argmax_p = p1;
    }
    if (std::abs(p1 - 0.5) >= grid_step * 0.5 && !(ret < report.uniform_return))
      report.violations.push_back(p1);
  }
  report.passed = report.violations.empty() && std::abs(report.argmax_p - 0.5) < grid_step * 0.5;
  return report;
}

namespace {

// Compositions of `units` into k nonnegative parts.
void simplex_grid(int k, int units, std::vector<int>& current, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(current.size()) == k - 1) {
    const int used = std::accumulate(current.begin(), current.end(), 0);
    current.push_back(units - used);
    out.push_back(current);
    current.pop_back();
    return;
  }
  const int used = std::accumulate(current.begin(), current.end(), 0);
  for (int v = 0; v <= units - used; ++v) {
    current.push_back(v);
    simplex_grid(k, units, current, out);
    current.pop_back();
  }
}

}  // namespace

TheoremReport verify_theorem_usefulness(int k, int n, double lambda) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  if (!(lambda > 0.0 && lambda < 1.0)) throw std::invalid_argument("lambda must lie in (0, 1)");

  constexpr int kUnits = 4;
  std::vector<std::vector<int>> grid;
  std::vector<int> current;
  simplex_grid(k, kUnits, current, grid);

  TheoremReport report{k, n, lambda, {}, true};
  for (const auto& units : grid) {
    AbstractMetaModel model{k, n, lambda, {}, std::vector<double>(static_cast<std::size_t>(k), 1.0)};
    for (int v : units) model.p.push_back(static_cast<double>(v) / kUnits);
    const double full = meta_return(model);
    for (int l = 0; l < k; ++l) {
      auto lowered = model;
      lowered.u[static_cast<std::size_t>(l)] = 0.9;
      const double reduced = meta_return(lowered);
      const bool positive = model.p[static_cast<std::size_t>(l)] > 0.0;
      const bool ok = positive ? full > reduced : full == reduced;
      report.checks.push_back({model.p, l, reduced, full, ok});
      report.passed = report.passed && ok;
    }
  }
  return report;
}

void LotterySetup::validate() const {
  if (!(r > 0.0 && r < 1.0 && s > 0.0 && s < 1.0)) throw std::invalid_argument("r and s must lie in (0, 1)");
  if (r + s > 1.0 + 1e-12) throw std::invalid_argument("r + s must not exceed 1");
  if (a.empty() || p.size() != a.size() || q.size() != a.size())
    throw std::invalid_argument("a, p and q must be nonempty and equally sized");
  for (const auto* v : {&a, &p, &q}) {
    for (double x : *v)
      if (!(x > 0.0 && x < 1.0)) throw std::invalid_argument("probabilities must lie in (0, 1)");
    if (!sums_to_one(*v)) throw std::invalid_argument("probability vectors must sum to 1");
  }
  if (!(b >= 0.0 && b < 1.0)) throw std::invalid_argument("b must lie in [0, 1)");
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
}

double max_feasible_delta(const LotterySetup& setup) {
  double limit = 1.0 - setup.b;
  for (std::size_t i = 0; i < setup.a.size(); ++i) {
    const double gap = setup.q[i] - setup.p[i];
    if (gap > 0.0) limit = std::min(limit, (1.0 - setup.a[i]) * setup.r / (setup.s * gap));
    if (gap < 0.0) limit = std::min(limit, setup.a[i] * setup.r / (setup.s * -gap));
  }
  return limit;
}

DominanceShift dominance_construct(const LotterySetup& setup) {
  setup.validate();
  const double limit = max_feasible_delta(setup);
  if (setup.delta > limit)
    throw InfeasibleShift("delta " + std::to_string(setup.delta) + " exceeds the maximal feasible " +
                              std::to_string(limit),
                          limit);

  const double r = setup.r, s = setup.s, b = setup.b, d = setup.delta;
  DominanceShift out;
  for (std::size_t i = 0; i < setup.a.size(); ++i) {
    const double eps = s * d * (setup.q[i] - setup.p[i]) / r;
    out.epsilon.push_back(eps);
    out.e.push_back(s * d * setup.q[i]);
    out.pr_before.push_back(r * setup.a[i] + s * b * setup.p[i] + s * (1.0 - b) * setup.q[i]);
    out.pr_after.push_back(r * (setup.a[i] + eps) + s * (b + d) * setup.p[i] +
                           s * (1.0 - b - d) * setup.q[i]);
    if (std::abs(out.pr_after.back() - out.pr_before.back()) > 1e-12)
      throw std::logic_error("shift does not preserve Pr{X_i or Y_i}");
  }
  return out;
}

namespace {

std::vector<double> random_simplex_point(Rng& rng, int n) {
  std::vector<double> v;
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    v.push_back(0.05 + rng.uniform());
    total += v.back();
  }
  for (double& x : v) x /= total;
  return v;
}

}  // namespace

LotterySetup random_lottery_setup(Rng& rng, int max_n) {
  if (max_n < 2) throw std::invalid_argument("max_n must be >= 2");
  LotterySetup s;
  const int n = 2 + static_cast<int>(rng.below(max_n - 1));
  s.r = 0.05 + 0.9 * rng.uniform();
  s.s = (1.0 - s.r) * (0.05 + 0.95 * rng.uniform());
  s.a = random_simplex_point(rng, n);
  s.p = random_simplex_point(rng, n);
  s.q = random_simplex_point(rng, n);
  s.b = 0.9 * rng.uniform();
  s.delta = max_feasible_delta(s) * (0.01 + 0.98 * rng.uniform());
  return s;
}

}  // namespace drestlab
