#include "drestlab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "drestlab/worlds.hpp"

namespace drestlab {

namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, std::string_view text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double to_double(std::string_view key, std::string_view v) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end)
    throw std::invalid_argument("config key '" + std::string(key) + "': not a number '" + std::string(v) + "'");
  return out;
}

template <typename Int>
Int to_int(std::string_view key, std::string_view v) {
  Int out = 0;
  const auto* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end)
    throw std::invalid_argument("config key '" + std::string(key) + "': not an integer '" + std::string(v) + "'");
  return out;
}

}  // namespace

TrainConfig ExperimentConfig::resolved(std::uint64_t seed) const {
  TrainConfig t = train;
  t.seed = seed;
  if (lr_horizon_metas) t.lr.horizon = static_cast<long>(*lr_horizon_metas) * t.minis_per_meta;
  if (eps_horizon_metas) t.epsilon.horizon = static_cast<long>(*eps_horizon_metas) * t.minis_per_meta;
  return t;
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"main", "lopsided", "appendix_e",
                                                 "sweep_lambda_metasize"};
  return names;
}

ExperimentConfig preset_config(std::string_view name) {
  ExperimentConfig c;
  c.preset = std::string(name);
  TrainConfig& t = c.train;
  // Shared base: the example-gridworld experiments.
  t.reward = RewardSpec{RewardVariant::drest, 0.9, std::nullopt};
  t.gamma = 0.95;
  t.minis_per_meta = 64;
  t.meta_count = 2048;
  t.lr = Schedule{0.25, 0.01, 65536};
  t.epsilon = Schedule{0.5, 0.001, 65536};
  t.eval_every = 8;
  c.world = "example";

  if (name == "main") {
  } else if (name == "lopsided") {
    c.world = "lopsided";
    t.reward.variant = RewardVariant::drest_unnormalized;
    t.gamma = 1.0;
    t.meta_count = 512;
    t.lr = Schedule{0.25, 0.003, 1};
    t.epsilon = Schedule{0.5, 0.0001, 1};
    c.lr_horizon_metas = 256;
    c.eps_horizon_metas = 256;
  } else if (name == "appendix_e") {
    c.world = "fewer_for_longer";
    t.gamma = 0.9;
    t.meta_count = 1024;
    t.lr = Schedule{0.25, 0.003, 1};
    t.epsilon = Schedule{0.75, 1e-4, 1};
    c.lr_horizon_metas = 512;
    c.eps_horizon_metas = 512;
  } else if (name == "sweep_lambda_metasize") {
    t.reward.clip = 5.0;
    t.meta_count = static_cast<int>(kSweepTotalMinis / t.minis_per_meta);
  } else {
    throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
  }
  return c;
}

std::vector<std::uint64_t> parse_seed_list(std::string_view text) {
  std::vector<std::uint64_t> seeds;
  text = trim(text);
  if (text.empty() || text == "none") return seeds;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    const auto item = trim(text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
    const auto dots = item.find("..");
    if (dots != std::string_view::npos) {
      const auto lo = to_int<std::uint64_t>("seeds", trim(item.substr(0, dots)));
      const auto hi = to_int<std::uint64_t>("seeds", trim(item.substr(dots + 2)));
      if (hi < lo) throw std::invalid_argument("seed range " + std::string(item) + " is empty");
      for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
    } else {
      seeds.push_back(to_int<std::uint64_t>("seeds", item));
    }
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return seeds;
}

void set_config_value(ExperimentConfig& c, std::string_view key, std::string_view value) {
  TrainConfig& t = c.train;
  if (key == "preset") {
    c = preset_config(value);
  } else if (key == "world") {
    c.world = std::string(value);
  } else if (key == "variant") {
    t.reward.variant = parse_reward_variant(value);
  } else if (key == "lambda") {
    t.reward.lambda = to_double(key, value);
  } else if (key == "clip") {
    if (value == "none" || value.empty()) t.reward.clip.reset();
    else t.reward.clip = to_double(key, value);
  } else if (key == "gamma") {
    t.gamma = to_double(key, value);
  } else if (key == "minis_per_meta") {
    t.minis_per_meta = to_int<int>(key, value);
  } else if (key == "meta_count") {
    t.meta_count = to_int<int>(key, value);
  } else if (key == "lr_start") {
    t.lr.start = to_double(key, value);
  } else if (key == "lr_end") {
    t.lr.end = to_double(key, value);
  } else if (key == "lr_horizon") {
    t.lr.horizon = to_int<long>(key, value);
    c.lr_horizon_metas.reset();
  } else if (key == "lr_horizon_metas") {
    c.lr_horizon_metas = to_int<int>(key, value);
  } else if (key == "eps_start") {
    t.epsilon.start = to_double(key, value);
  } else if (key == "eps_end") {
    t.epsilon.end = to_double(key, value);
  } else if (key == "eps_horizon") {
    t.epsilon.horizon = to_int<long>(key, value);
    c.eps_horizon_metas.reset();
  } else if (key == "eps_horizon_metas") {
    c.eps_horizon_metas = to_int<int>(key, value);
  } else if (key == "eval_every") {
    t.eval_every = to_int<int>(key, value);
  } else if (key == "seeds") {
    c.seeds = parse_seed_list(value);
  } else if (key == "seed") {
    c.seeds = {to_int<std::uint64_t>(key, value)};
  } else if (key == "out_dir") {
    c.out_dir = fs::path(std::string(value));
  } else {
    throw std::invalid_argument("unknown config key '" + std::string(key) + "'");
  }
}

ExperimentConfig parse_experiment_config(std::string_view text) {
  std::vector<std::pair<std::string, std::string>> entries;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos)
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key=value");
    entries.emplace_back(std::string(trim(view.substr(0, eq))), std::string(trim(view.substr(eq + 1))));
  }

  ExperimentConfig c = preset_config("main");
  for (const auto& [k, v] : entries)
    if (k == "preset") set_config_value(c, k, v);

  std::optional<std::uint64_t> expected_hash;
  for (const auto& [k, v] : entries) {
    if (k == "preset" || k == "run_id" || k == "code_version" || k == "duration_s") continue;
    if (k == "world_hash") {
      expected_hash = to_int<std::uint64_t>(k, v);
      continue;
    }
    set_config_value(c, k, v);
  }
  if (expected_hash && world_hash(load_world_text(c.world)) != *expected_hash)
    throw std::invalid_argument("world '" + c.world + "' does not match the recorded world_hash");
  return c;
}

std::string experiment_config_text(const ExperimentConfig& c) {
  const TrainConfig t = c.resolved(0);
  std::ostringstream out;
  out << "preset=" << c.preset << '\n'
      << "world=" << c.world << '\n'
      << "variant=" << to_string(t.reward.variant) << '\n'
      << "lambda=" << format_double(t.reward.lambda) << '\n'
      << "clip=" << (t.reward.clip ? format_double(*t.reward.clip) : std::string("none")) << '\n'
      << "gamma=" << format_double(t.gamma) << '\n'
      << "minis_per_meta=" << t.minis_per_meta << '\n'
      << "meta_count=" << t.meta_count << '\n'
      << "lr_start=" << format_double(t.lr.start) << '\n'
      << "lr_end=" << format_double(t.lr.end) << '\n'
      << "lr_horizon=" << t.lr.horizon << '\n'
      << "eps_start=" << format_double(t.epsilon.start) << '\n'
      << "eps_end=" << format_double(t.epsilon.end) << '\n'
      << "eps_horizon=" << t.epsilon.horizon << '\n'
      << "eval_every=" << t.eval_every << '\n';
  return out.str();
}

std::uint64_t world_hash(std::string_view world_text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : world_text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string manifest_text(const RunManifest& m) {
  std::ostringstream out;
  out << "# run manifest: rerun with `drest train --config <this file>`\n"
      << "run_id=" << m.run_id << '\n'
      << experiment_config_text(m.config) << "seed=" << m.seed << '\n'
      << "world_hash=" << m.world_hash << '\n'
      << "code_version=" << m.code_version << '\n'
      << "duration_s=" << format_double(m.duration_s) << '\n';
  return out.str();
}

std::string history_csv(const std::string& run_id, const RunHistory& history) {
  std::string out = metrics_csv_header(history.profile.lengths) + '\n';
  for (const auto& e : history.evaluations) out += metrics_csv_row(run_id, e.meta_episode, e.report) + '\n';
  return out;
}

void write_run_artifacts(const fs::path& out_dir, const RunResult& result) {
  const fs::path dir = out_dir / "runs" / result.run_id;
  fs::create_directories(dir);
  write_file(dir / "history.csv", history_csv(result.run_id, result.history));
  write_file(dir / "policy.txt", dump_policy(result.history.policy));
  write_file(dir / "manifest.txt", manifest_text(result.manifest));
}

std::string run_id_for(const ExperimentConfig& config, std::string_view world_name, std::uint64_t seed) {
  return std::string(world_name) + "-" + std::string(to_string(config.train.reward.variant)) + "-s" +
         std::to_string(seed);
}

RunResult run_single(const ExperimentConfig& config, const GridSpec& world, std::uint64_t seed,
                     const std::string& run_id) {
  const auto started = std::chrono::steady_clock::now();
  RunResult r;
  r.run_id = run_id;
  r.seed = seed;
  r.history = train(world, config.resolved(seed));
  r.manifest.config = config;
  r.manifest.config.seeds = {seed};
  r.manifest.run_id = run_id;
  r.manifest.seed = seed;
  r.manifest.world_hash = world_hash(serialize_gridspec(world));
  r.manifest.duration_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return r;
}

int worker_count() {
  if (const char* env = std::getenv("DREST_WORKERS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(int count, int workers, const std::function<void(int)>& task) {
  workers = std::max(1, std::min(workers, count));
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
  {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (int i = next++; i < count; i = next++) {
          try {
            task(i);
          } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
          }
        }
      });
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::vector<RunResult> run_experiment(const ExperimentConfig& config, int workers) {
  const std::string world_text = load_world_text(config.world);
  const GridSpec world = parse_gridspec(world_text);
  config.resolved(0).validate();

  std::vector<RunResult> results(config.seeds.size());
  parallel_for(static_cast<int>(config.seeds.size()), workers, [&](int i) {
    const auto seed = config.seeds[static_cast<std::size_t>(i)];
    auto r = run_single(config, world, seed, run_id_for(config, world.name(), seed));
    r.manifest.world_hash = world_hash(world_text);
    write_run_artifacts(config.out_dir, r);
    results[static_cast<std::size_t>(i)] = std::move(r);
  });

  std::string index = "schema_version,run_id,world,variant,seed,meta_episode,usefulness,neutrality,pr_long\n";
  for (const auto& r : results) {
    const auto& evals = r.history.evaluations;
    index += std::to_string(kCsvSchemaVersion) + "," + r.run_id + "," + world.name() + "," +
             std::string(to_string(config.train.reward.variant)) + "," + std::to_string(r.seed);
    if (evals.empty()) {
      index += ",0,,,\n";
      continue;
    }
    const auto& last = evals.back();
    index += "," + std::to_string(last.meta_episode) + "," + format_double(last.report.usefulness) + "," +
             format_double(last.report.neutrality) + "," + format_double(final_pr_long(r.history)) + "\n";
  }
  write_file(config.out_dir / "index.csv", index);
  return results;
}

double final_pr_long(const RunHistory& history) {
  if (history.evaluations.empty() || history.profile.k() < 2) return 0.0;
  return history.evaluations.back().report.pr_length.back();
}

// ---- sweeps ---------------------------------------------------------------

std::vector<double> log_uniform_grid(double x_min, double x_max, int points) {
  if (!(x_min > 0.0 && x_max > x_min)) throw std::invalid_argument("need 0 < x_min < x_max");
  if (points < 1) throw std::invalid_argument("need at least one sweep point");
  if (points == 1) return {x_min};
  std::vector<double> xs;
  const double lo = std::log10(x_min), hi = std::log10(x_max);
  for (int i = 0; i < points; ++i) xs.push_back(std::pow(10.0, lo + (hi - lo) * i / (points - 1)));
  return xs;
}

namespace {

int far_coin_slot(const GridSpec& world) {
  for (const auto& c : world.coins())
    if (c.token == "Cx") return c.slot;
  if (world.coins().empty()) throw std::invalid_argument("lopsided world has no coins");
  return static_cast<int>(world.coins().size());
}

}  // namespace

std::vector<LopsidedRow> sweep_lopsided(const ExperimentConfig& base, const std::vector<double>& xs,
                                        const std::vector<std::uint64_t>& seeds, int workers) {
  const GridSpec world = load_world(base.world);
  const int slot = far_coin_slot(world);
  const std::vector<RewardVariant> variants = {RewardVariant::default_reward,
                                               RewardVariant::drest_unnormalized};
  for (double x : xs)
    if (!(x > 0.0)) throw std::invalid_argument("coin values must be positive");

  std::vector<LopsidedRow> rows(xs.size() * variants.size() * seeds.size());
  parallel_for(static_cast<int>(rows.size()), workers, [&](int task) {
    const auto idx = static_cast<std::size_t>(task);
    const std::size_t si = idx % seeds.size();
    const std::size_t vi = (idx / seeds.size()) % variants.size();
    const std::size_t xi = idx / (seeds.size() * variants.size());
    ExperimentConfig c = base;
    c.train.reward.variant = variants[vi];
    c.train.eval_every = std::max(1, c.train.meta_count);
    const GridSpec w = world.with_coin_value(slot, xs[xi]);
    const RunHistory h = train(w, c.resolved(seeds[si]));
    LopsidedRow& row = rows[idx];
    row.x = xs[xi];
    row.seed = seeds[si];
    row.variant = variants[vi];
    if (!h.evaluations.empty()) {
      row.pr_long = final_pr_long(h);
      row.neutrality = h.evaluations.back().report.neutrality;
      row.usefulness = h.evaluations.back().report.usefulness;
    }
  });
  return rows;
}

std::vector<LopsidedSummary> summarize_lopsided(const std::vector<LopsidedRow>& rows) {
  std::map<std::pair<double, int>, std::vector<const LopsidedRow*>> groups;
  for (const auto& r : rows) groups[{r.x, static_cast<int>(r.variant)}].push_back(&r);
  std::vector<LopsidedSummary> out;
  for (const auto& [key, members] : groups) {
    std::vector<double> pr, ne;
    for (const auto* m : members) {
      pr.push_back(m->pr_long);
      ne.push_back(m->neutrality);
    }
    LopsidedSummary s;
    s.x = key.first;
    s.variant = static_cast<RewardVariant>(key.second);
    s.mean_pr_long = mean(pr);
    s.p10_pr_long = percentile(pr, 10);
    s.p90_pr_long = percentile(pr, 90);
    s.mean_neutrality = mean(ne);
    s.p10_neutrality = percentile(ne, 10);
    s.p90_neutrality = percentile(ne, 90);
    out.push_back(s);
  }
  return out;
}

std::vector<GridRow> sweep_lambda_metasize(const ExperimentConfig& base,
                                           const std::vector<double>& lambdas,
                                           const std::vector<int>& meta_sizes,
                                           const std::vector<std::uint64_t>& seeds, int workers) {
  if (lambdas.empty() || meta_sizes.empty()) throw std::invalid_argument("sweep grids must be nonempty");
  const GridSpec world = load_world(base.world);
  for (int e : meta_sizes)
    if (e < 1 || kSweepTotalMinis % e != 0)
      throw std::invalid_argument("meta-episode size must divide " + std::to_string(kSweepTotalMinis));

  std::vector<GridRow> rows(lambdas.size() * meta_sizes.size() * seeds.size());
  parallel_for(static_cast<int>(rows.size()), workers, [&](int task) {
    const auto idx = static_cast<std::size_t>(task);
    const std::size_t si = idx % seeds.size();
    const std::size_t ei = (idx / seeds.size()) % meta_sizes.size();
    const std::size_t li = idx / (seeds.size() * meta_sizes.size());
    ExperimentConfig c = base;
    c.train.reward.lambda = lambdas[li];
    c.train.minis_per_meta = meta_sizes[ei];
    c.train.meta_count = static_cast<int>(kSweepTotalMinis / meta_sizes[ei]);
    c.train.eval_every = c.train.meta_count;
    const RunHistory h = train(world, c.resolved(seeds[si]));
    GridRow& row = rows[idx];
    row.lambda = lambdas[li];
    row.minis_per_meta = meta_sizes[ei];
    row.seed = seeds[si];
    row.neutrality = h.evaluations.back().report.neutrality;
    row.usefulness = h.evaluations.back().report.usefulness;
  });
  return rows;
}

std::vector<GridSummary> summarize_grid(const std::vector<GridRow>& rows) {
  std::map<std::pair<double, int>, std::vector<const GridRow*>> groups;
  for (const auto& r : rows) groups[{r.lambda, r.minis_per_meta}].push_back(&r);
  std::vector<GridSummary> out;
  for (const auto& [key, members] : groups) {
    std::vector<double> ne, us;
    for (const auto* m : members) {
      ne.push_back(m->neutrality);
      us.push_back(m->usefulness);
    }
    out.push_back({key.first, key.second, static_cast<int>(members.size()), mean(ne), stddev(ne),
                   mean(us), stddev(us)});
  }
  return out;
}

std::string lopsided_rows_csv(const std::vector<LopsidedRow>& rows) {
  std::string out = "schema_version,x,seed,variant,pr_long,neutrality,usefulness\n";
  for (const auto& r : rows)
    out += std::to_string(kCsvSchemaVersion) + "," + format_double(r.x) + "," + std::to_string(r.seed) + "," +
           std::string(to_string(r.variant)) + "," + format_double(r.pr_long) + "," +
           format_double(r.neutrality) + "," + format_double(r.usefulness) + "\n";
  return out;
}

std::string lopsided_summary_csv(const std::vector<LopsidedSummary>& rows) {
  std::string out =
      "schema_version,x,variant,mean_pr_long,p10_pr_long,p90_pr_long,mean_neutrality,p10_neutrality,"
      "p90_neutrality\n";
  for (const auto& s : rows)
    out += std::to_string(kCsvSchemaVersion) + "," + format_double(s.x) + "," + std::string(to_string(s.variant)) +
           "," + format_double(s.mean_pr_long) + "," + format_double(s.p10_pr_long) + "," +
           format_double(s.p90_pr_long) + "," + format_double(s.mean_neutrality) + "," +
           format_double(s.p10_neutrality) + "," + format_double(s.p90_neutrality) + "\n";
  return out;
}

std::string grid_rows_csv(const std::vector<GridRow>& rows) {
  std::string out = "schema_version,lambda,minis_per_meta,seed,neutrality,usefulness\n";
  for (const auto& r : rows)
    out += std::to_string(kCsvSchemaVersion) + "," + format_double(r.lambda) + "," +
           std::to_string(r.minis_per_meta) + "," + std::to_string(r.seed) + "," +
           format_double(r.neutrality) + "," + format_double(r.usefulness) + "\n";
  return out;
}

std::string grid_summary_csv(const std::vector<GridSummary>& rows) {
  std::string out =
      "schema_version,lambda,minis_per_meta,runs,mean_neutrality,std_neutrality,mean_usefulness,"
      "std_usefulness\n";
  for (const auto& s : rows)
    out += std::to_string(kCsvSchemaVersion) + "," + format_double(s.lambda) + "," +
           std::to_string(s.minis_per_meta) + "," + std::to_string(s.runs) + "," +
           format_double(s.mean_neutrality) + "," + format_double(s.std_neutrality) + "," +
           format_double(s.mean_usefulness) + "," + format_double(s.std_usefulness) + "\n";
  return out;
}

// ---- statistics -----------------------------------------------------------

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double total = 0.0;
  for (double x : v) total += x;
  return total / static_cast<double>(v.size());
}

double stddev(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double mu = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - mu) * (x - mu);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double percentile(std::vector<double> v, double q) {
  if (v.empty()) throw std::invalid_argument("percentile of an empty sample");
  if (!(q >= 0.0 && q <= 100.0)) throw std::invalid_argument("percentile must lie in [0, 100]");
  std::sort(v.begin(), v.end());
  const double pos = q / 100.0 * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return v[lo] + (v[hi] - v[lo]) * frac;
}

std::vector<double> moving_average(const std::vector<double>& v, int period) {
  if (period < 1) throw std::invalid_argument("moving-average period must be >= 1");
  std::vector<double> out(v.size());
  double window = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    window += v[i];
    if (i >= static_cast<std::size_t>(period)) window -= v[i - static_cast<std::size_t>(period)];
    const auto n = std::min(i + 1, static_cast<std::size_t>(period));
    out[i] = window / static_cast<double>(n);
  }
  return out;
}

// ---- figure data ----------------------------------------------------------

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::string export_training_curves(const fs::path& out_dir) {
  std::string out = "schema_version,run_id,world,variant,seed,meta_episode,usefulness,neutrality,pr_long\n";
  const fs::path runs = out_dir / "runs";
  if (!fs::exists(runs)) return out;
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(runs))
    if (entry.is_directory()) dirs.push_back(entry.path());
  std::sort(dirs.begin(), dirs.end());

  for (const auto& dir : dirs) {
    if (!fs::exists(dir / "history.csv") || !fs::exists(dir / "manifest.txt")) continue;
    std::map<std::string, std::string> manifest;
    {
      std::istringstream in(read_file(dir / "manifest.txt"));
      std::string line;
      while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq != std::string::npos) manifest[line.substr(0, eq)] = line.substr(eq + 1);
      }
    }
    std::istringstream in(read_file(dir / "history.csv"));
    std::string line;
    if (!std::getline(in, line)) continue;
    const auto header = split_csv(line);
    auto column = [&](std::string_view name) {
      const auto it = std::find(header.begin(), header.end(), name);
      if (it == header.end()) throw std::runtime_error(dir.string() + ": history.csv lacks column " + std::string(name));
      return static_cast<std::size_t>(it - header.begin());
    };
    const auto meta_col = column("meta_episode"), use_col = column("usefulness"), neu_col = column("neutrality");
    std::optional<std::size_t> pr_long_col;
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i].rfind("pr_L", 0) == 0) pr_long_col = i;
    int pr_cols = 0;
    for (const auto& h : header) pr_cols += h.rfind("pr_L", 0) == 0;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto cells = split_csv(line);
      out += std::to_string(kCsvSchemaVersion) + "," + dir.filename().string() + "," + manifest["world"] + "," +
             manifest["variant"] + "," + manifest["seed"] + "," + cells.at(meta_col) + "," + cells.at(use_col) +
             "," + cells.at(neu_col) + "," + (pr_cols > 1 ? cells.at(*pr_long_col) : std::string("0")) + "\n";
    }
  }
  return out;
}

}  // namespace drestlab
