#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "drestlab/gridworld.hpp"
#include "drestlab/trainer.hpp"

namespace drestlab {

inline constexpr std::string_view kCodeVersion = "drestlab 1.0.0";

// Mini-episodes per run in the lambda x |E| sweep; meta_count = total / |E|.
inline constexpr long kSweepTotalMinis = 131072;

struct ExperimentConfig {
  std::string preset = "main";
  std::string world = "example";  // registry name or path to a .world file
  TrainConfig train;
  // Decay horizons given in meta-episodes; resolved against minis_per_meta.
  std::optional<int> lr_horizon_metas;
  std::optional<int> eps_horizon_metas;
  std::vector<std::uint64_t> seeds;
  std::filesystem::path out_dir = "out";

  // TrainConfig for one seed with meta-episode horizons converted to minis.
  TrainConfig resolved(std::uint64_t seed) const;
};

// main | lopsided | appendix_e | sweep_lambda_metasize
ExperimentConfig preset_config(std::string_view name);
const std::vector<std::string>& preset_names();

// Applies one `key=value` override. Unknown keys throw std::invalid_argument.
void set_config_value(ExperimentConfig& config, std::string_view key, std::string_view value);

// Plain `key=value` lines; `#` starts a comment. A `preset` line is applied
// first, so explicit keys always override the preset. Manifest keys (seed,
// world_hash, run_id, code_version, duration_s) are accepted; a world_hash
// that does not match the world is an error.
ExperimentConfig parse_experiment_config(std::string_view text);
std::string experiment_config_text(const ExperimentConfig& config);

std::vector<std::uint64_t> parse_seed_list(std::string_view text);

// 64-bit FNV-1a of the world file text.
std::uint64_t world_hash(std::string_view world_text);

struct RunManifest {
  ExperimentConfig config;  // seeds holds exactly the run's seed
  std::string run_id;
  std::uint64_t seed = 0;
  std::uint64_t world_hash = 0;
  std::string code_version{kCodeVersion};
  double duration_s = 0.0;
};

std::string manifest_text(const RunManifest& manifest);

struct RunResult {
  std::string run_id;
  std::uint64_t seed = 0;
  RunHistory history;
  RunManifest manifest;
};

std::string history_csv(const std::string& run_id, const RunHistory& history);

// Writes runs/<id>/{history.csv,policy.txt,manifest.txt} under `out_dir`.
void write_run_artifacts(const std::filesystem::path& out_dir, const RunResult& result);

// Trains one seed of `config` on an already loaded world.
RunResult run_single(const ExperimentConfig& config, const GridSpec& world, std::uint64_t seed,
                     const std::string& run_id);

// Worker count from DREST_WORKERS, else hardware concurrency (at least 1).
int worker_count();

// Runs task(0..count-1) on up to `workers` threads. Results are placed by
// index, so scheduling never affects output.
void parallel_for(int count, int workers, const std::function<void(int)>& task);

// Trains every seed of `config` and writes per-run artifacts plus index.csv.
std::vector<RunResult> run_experiment(const ExperimentConfig& config, int workers);

std::string run_id_for(const ExperimentConfig& config, std::string_view world_name,
                       std::uint64_t seed);

// ---- sweeps ---------------------------------------------------------------

struct LopsidedRow {
  double x = 0.0;
  std::uint64_t seed = 0;
  RewardVariant variant = RewardVariant::default_reward;
  double pr_long = 0.0;
  double neutrality = 0.0;
  double usefulness = 0.0;
};

struct LopsidedSummary {
  double x = 0.0;
  RewardVariant variant = RewardVariant::default_reward;
  double mean_pr_long = 0.0, p10_pr_long = 0.0, p90_pr_long = 0.0;
  double mean_neutrality = 0.0, p10_neutrality = 0.0, p90_neutrality = 0.0;
};

// `points` values spaced evenly in log10 between x_min and x_max inclusive.
std::vector<double> log_uniform_grid(double x_min, double x_max, int points);

// Trains default and drest_unnormalized agents on lopsided.world with the far
// coin set to each x. `base` supplies hyperparameters (normally the
// `lopsided` preset).
std::vector<LopsidedRow> sweep_lopsided(const ExperimentConfig& base, const std::vector<double>& xs,
                                        const std::vector<std::uint64_t>& seeds, int workers);
std::vector<LopsidedSummary> summarize_lopsided(const std::vector<LopsidedRow>& rows);

struct GridRow {
  double lambda = 0.0;
  int minis_per_meta = 0;
  std::uint64_t seed = 0;
  double neutrality = 0.0;
  double usefulness = 0.0;
};

struct GridSummary {
  double lambda = 0.0;
  int minis_per_meta = 0;
  int runs = 0;
  double mean_neutrality = 0.0, std_neutrality = 0.0;
  double mean_usefulness = 0.0, std_usefulness = 0.0;
};

// DReST agents for every (lambda, |E|) pair with meta_count chosen so each run
// sees kSweepTotalMinis mini-episodes. Only the final evaluation is kept.
std::vector<GridRow> sweep_lambda_metasize(const ExperimentConfig& base,
                                           const std::vector<double>& lambdas,
                                           const std::vector<int>& meta_sizes,
                                           const std::vector<std::uint64_t>& seeds, int workers);
std::vector<GridSummary> summarize_grid(const std::vector<GridRow>& rows);

std::string lopsided_rows_csv(const std::vector<LopsidedRow>& rows);
std::string lopsided_summary_csv(const std::vector<LopsidedSummary>& rows);
std::string grid_rows_csv(const std::vector<GridRow>& rows);
std::string grid_summary_csv(const std::vector<GridSummary>& rows);

// ---- statistics -----------------------------------------------------------

double mean(const std::vector<double>& v);
// Sample standard deviation (n - 1); 0 for fewer than two values.
double stddev(const std::vector<double>& v);
// Linear interpolation between order statistics, q in [0, 100].
double percentile(std::vector<double> v, double q);
// Trailing simple moving average; the first period-1 points average what is
// available.
std::vector<double> moving_average(const std::vector<double>& v, int period);

// Pr of the longest achievable length at the final evaluation (0 when k = 1).
double final_pr_long(const RunHistory& history);

// Writes a long-format CSV of every run's history found under out_dir/runs.
std::string export_training_curves(const std::filesystem::path& out_dir);

std::string format_double(double v);
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view text);

}  // namespace drestlab
