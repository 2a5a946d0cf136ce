#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "drestlab/evaluator.hpp"
#include "drestlab/experiment.hpp"
#include "drestlab/oracle.hpp"
#include "drestlab/worlds.hpp"

namespace fs = std::filesystem;
using namespace drestlab;

namespace {

struct ConfigArgs {
  std::string config_file;
  std::string preset;
  std::vector<std::string> sets;
  std::string seeds;
  std::string out;
  std::string world;
};

void add_config_options(CLI::App* cmd, ConfigArgs& args) {
  cmd->add_option("--config", args.config_file, "key=value config or run manifest");
  cmd->add_option("--preset", args.preset, "main | lopsided | appendix_e | sweep_lambda_metasize");
  cmd->add_option("--set", args.sets, "override one key, e.g. --set variant=default")->take_all();
  cmd->add_option("--seeds", args.seeds, "seed list, e.g. 1..10 or 3,5,8");
  cmd->add_option("--world", args.world, "world name or .world path");
  cmd->add_option("--out", args.out, "output directory");
}

ExperimentConfig build_config(const ConfigArgs& args, std::string_view fallback_preset) {
  ExperimentConfig c = preset_config(fallback_preset);
  if (!args.config_file.empty()) c = parse_experiment_config(read_file(args.config_file));
  if (!args.preset.empty()) {
    // An explicit preset replaces whatever the config file chose, but keeps
    // its seeds and output directory.
    auto seeds = c.seeds;
    auto out = c.out_dir;
    c = preset_config(args.preset);
    c.seeds = seeds;
    c.out_dir = out;
  }
  if (!args.world.empty()) c.world = args.world;
  for (const auto& kv : args.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
    set_config_value(c, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (!args.seeds.empty()) c.seeds = parse_seed_list(args.seeds);
  if (!args.out.empty()) c.out_dir = args.out;
  return c;
}

int cmd_worlds_list() {
  for (const auto& w : shipped_worlds()) {
    const GridSpec spec = parse_gridspec(w.text);
    std::cout << w.name << "  " << spec.width() << "x" << spec.height() << "  lengths";
    for (int l : achievable_lengths(spec)) std::cout << ' ' << l;
    std::cout << '\n';
  }
  return 0;
}

int cmd_worlds_validate(const std::vector<std::string>& targets) {
  std::vector<std::string> names = targets;
  if (names.empty())
    for (const auto& w : shipped_worlds()) names.push_back(w.name);
  int failures = 0;
  for (const auto& n : names) {
    try {
      const GridSpec spec = load_world(n);
      const auto profile = make_length_profile(spec, 0.95);
      std::cout << "ok    " << n << "  m(gamma=0.95):";
      for (std::size_t i = 0; i < profile.lengths.size(); ++i)
        std::cout << " L" << profile.lengths[i] << "=" << format_double(profile.m[i]);
      std::cout << '\n';
    } catch (const std::exception& e) {
      ++failures;
      std::cout << "FAIL  " << n << ": " << e.what() << '\n';
    }
  }
  return failures == 0 ? 0 : 1;
}

int cmd_train(const ConfigArgs& args) {
  const ExperimentConfig c = build_config(args, "main");
  const auto results = run_experiment(c, worker_count());
  for (const auto& r : results) {
    if (r.history.evaluations.empty()) {
      std::cout << r.run_id << "  (no evaluations)\n";
      continue;
    }
    const auto& last = r.history.evaluations.back().report;
    std::cout << r.run_id << "  usefulness=" << format_double(last.usefulness)
              << "  neutrality=" << format_double(last.neutrality) << '\n';
  }
  std::cout << results.size() << " run(s) written under " << c.out_dir.string() << '\n';
  return 0;
}

int cmd_eval(const std::string& world, const std::string& policy_file, double gamma, double epsilon) {
  const GridSpec spec = load_world(world);
  const PolicyTable policy = parse_policy(read_file(policy_file));
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("epsilon must lie in [0, 1]");
  const auto profile = make_length_profile(spec, gamma);
  const auto report = exact_eval(spec, policy, epsilon, profile);
  std::cout << metrics_csv_header(profile.lengths) << '\n' << metrics_csv_row("eval", 0, report) << '\n';
  return 0;
}

int cmd_sweep_lopsided(const ConfigArgs& args, double x_min, double x_max, int points) {
  ConfigArgs a = args;
  if (a.world.empty() && a.config_file.empty()) a.world = "lopsided";
  ExperimentConfig c = build_config(a, "lopsided");
  if (c.seeds.empty()) c.seeds = parse_seed_list("1..10");
  const auto xs = log_uniform_grid(x_min, x_max, points);
  const auto rows = sweep_lopsided(c, xs, c.seeds, worker_count());
  write_file(c.out_dir / "rows.csv", lopsided_rows_csv(rows));
  write_file(c.out_dir / "summary.csv", lopsided_summary_csv(summarize_lopsided(rows)));
  std::cout << rows.size() << " lopsided run(s); summary in " << (c.out_dir / "summary.csv").string() << '\n';
  return 0;
}

std::vector<double> parse_doubles(const std::string& text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    out.push_back(std::stod(text.substr(pos, comma - pos)));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

int cmd_sweep_grid(const ConfigArgs& args, const std::string& lambdas, const std::string& sizes) {
  ExperimentConfig c = build_config(args, "sweep_lambda_metasize");
  if (c.seeds.empty()) c.seeds = parse_seed_list("1..8");
  std::vector<int> meta_sizes;
  for (double v : parse_doubles(sizes)) meta_sizes.push_back(static_cast<int>(v));
  const auto rows = sweep_lambda_metasize(c, parse_doubles(lambdas), meta_sizes, c.seeds, worker_count());
  write_file(c.out_dir / "rows.csv", grid_rows_csv(rows));
  write_file(c.out_dir / "summary.csv", grid_summary_csv(summarize_grid(rows)));
  std::cout << rows.size() << " grid run(s); summary in " << (c.out_dir / "summary.csv").string() << '\n';
  return 0;
}

struct VerifyArgs {
  int n = 8;
  double lambda = 0.9;
  double step = 0.01;
  std::vector<double> theorem_lambdas = {0.5, 0.9, 0.99};
  int lotteries = 1000;
  std::uint64_t seed = 1;
  std::string curve_out;
};

int cmd_verify(const VerifyArgs& v) {
  // Validate every input before running anything.
  if (!(v.lambda > 0.0 && v.lambda < 1.0)) throw std::invalid_argument("lambda must lie in (0, 1)");
  for (double l : v.theorem_lambdas)
    if (!(l > 0.0 && l < 1.0)) throw std::invalid_argument("theorem lambdas must lie in (0, 1)");
  if (v.n < 1) throw std::invalid_argument("n must be >= 1");
  if (!(v.step > 0.0 && v.step <= 0.5)) throw std::invalid_argument("step must lie in (0, 0.5]");
  if (v.lotteries < 0) throw std::invalid_argument("lotteries must be >= 0");

  int failures = 0;
  auto report = [&](bool ok, const std::string& what) {
    std::cout << (ok ? "PASS  " : "FAIL  ") << what << '\n';
    failures += ok ? 0 : 1;
  };

  const auto lemma = verify_lemma_d1(2, v.n, v.lambda, v.step);
  report(lemma.passed, "two-length return peaks uniquely at p=0.5 (n=" + std::to_string(v.n) +
                           ", lambda=" + format_double(v.lambda) + ", argmax " + format_double(lemma.argmax_p) +
                           ", " + std::to_string(lemma.violations.size()) + " violation(s))");
  if (!v.curve_out.empty()) {
    std::string csv = "schema_version,n,lambda,p_first,expected_return\n";
    for (const auto& pt : lemma.curve)
      csv += std::to_string(kCsvSchemaVersion) + "," + std::to_string(v.n) + "," + format_double(v.lambda) + "," +
             format_double(pt.p_first) + "," + format_double(pt.expected_return) + "\n";
    write_file(v.curve_out, csv);
  }

  for (double lam : v.theorem_lambdas)
    for (int k = 2; k <= 3; ++k) {
      const auto th = verify_theorem_usefulness(k, std::min(v.n, 8), lam);
      report(th.passed, "return strictly increasing in usefulness (k=" + std::to_string(k) +
                            ", lambda=" + format_double(lam) + ", " + std::to_string(th.checks.size()) + " checks)");
    }

  {
    double worst = 0.0;
    for (int n = 1; n <= 8; ++n)
      for (double p1 : {0.0, 0.2, 0.5, 0.9}) {
        const AbstractMetaModel m{2, n, v.lambda, {p1, 1.0 - p1}, {1.0, 0.7}};
        worst = std::max(worst, std::abs(expected_meta_return(m) - expected_meta_return_cumulative(m)));
      }
    report(worst < 1e-9, "enumerated and cumulative returns agree (max diff " + format_double(worst) + ")");
  }

  Rng rng(v.seed);
  int bad = 0;
  for (int i = 0; i < v.lotteries; ++i) {
    const auto setup = random_lottery_setup(rng);
    const auto shift = dominance_construct(setup);
    double sum = 0.0;
    bool ok = true;
    for (std::size_t j = 0; j < shift.epsilon.size(); ++j) {
      sum += shift.epsilon[j];
      ok = ok && shift.e[j] > 0.0 && std::abs(shift.pr_after[j] - shift.pr_before[j]) <= 1e-12;
    }
    if (!ok || std::abs(sum) > 1e-12) ++bad;
  }
  report(bad == 0, "dominance shift on " + std::to_string(v.lotteries) + " random lotteries (" +
                       std::to_string(bad) + " bad)");
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Train and evaluate DReST agents in shutdown-button gridworlds"};
  app.require_subcommand(1);

  auto* worlds = app.add_subcommand("worlds", "inspect shipped worlds");
  worlds->require_subcommand(1);
  worlds->add_subcommand("list", "list shipped worlds");
  std::vector<std::string> validate_targets;
  auto* validate = worlds->add_subcommand("validate", "parse worlds and compute m (all shipped if none given)");
  validate->add_option("worlds", validate_targets, "world names or paths");

  ConfigArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "train one agent per seed");
  add_config_options(train_cmd, train_args);

  std::string eval_world = "example", eval_policy;
  double eval_gamma = 0.95, eval_epsilon = 0.0;
  auto* eval_cmd = app.add_subcommand("eval", "exact metrics of a saved policy");
  eval_cmd->add_option("--world", eval_world, "world name or path");
  eval_cmd->add_option("--policy", eval_policy, "policy.txt from a run")->required();
  eval_cmd->add_option("--gamma", eval_gamma, "coin discount");
  eval_cmd->add_option("--epsilon", eval_epsilon, "uniform mixing during evaluation");

  auto* sweep = app.add_subcommand("sweep", "parameter sweeps");
  sweep->require_subcommand(1);
  ConfigArgs lop_args;
  double x_min = 0.01, x_max = 100.0;
  int points = 9;
  auto* lop = sweep->add_subcommand("lopsided", "vary the far coin's value on lopsided.world");
  add_config_options(lop, lop_args);
  lop->add_option("--x-min", x_min);
  lop->add_option("--x-max", x_max);
  lop->add_option("--points", points);

  ConfigArgs grid_args;
  std::string lambdas = "0.5,0.75,0.9,0.95,0.99", sizes = "8,16,32,64,128,256,512,1024";
  auto* grid = sweep->add_subcommand("grid", "lambda x meta-episode size");
  add_config_options(grid, grid_args);
  grid->add_option("--lambdas", lambdas);
  grid->add_option("--meta-sizes", sizes);

  VerifyArgs verify_args;
  auto* verify = app.add_subcommand("verify", "run the analytic oracle checks");
  verify->add_option("--n", verify_args.n, "mini-episodes per meta-episode");
  verify->add_option("--lambda", verify_args.lambda);
  verify->add_option("--step", verify_args.step, "probability grid step");
  verify->add_option("--theorem-lambdas", verify_args.theorem_lambdas)->delimiter(',');
  verify->add_option("--lotteries", verify_args.lotteries);
  verify->add_option("--seed", verify_args.seed);
  verify->add_option("--curve-out", verify_args.curve_out, "write the return-vs-p curve as CSV");

  std::string export_out = "out", export_to;
  auto* exp = app.add_subcommand("export-figure-data", "collect run histories into one CSV");
  exp->add_option("--out", export_out, "directory holding runs/");
  exp->add_option("--to", export_to, "destination (default <out>/training_curves.csv)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (worlds->got_subcommand("list")) return cmd_worlds_list();
    if (*validate) return cmd_worlds_validate(validate_targets);
    if (*train_cmd) return cmd_train(train_args);
    if (*eval_cmd) return cmd_eval(eval_world, eval_policy, eval_gamma, eval_epsilon);
    if (*lop) return cmd_sweep_lopsided(lop_args, x_min, x_max, points);
    if (*grid) return cmd_sweep_grid(grid_args, lambdas, sizes);
    if (*verify) return cmd_verify(verify_args);
    if (*exp) {
      const fs::path dest = export_to.empty() ? fs::path(export_out) / "training_curves.csv" : fs::path(export_to);
      write_file(dest, export_training_curves(export_out));
      std::cout << "wrote " << dest.string() << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
