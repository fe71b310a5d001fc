// gridflux command-line entry point: train, baseline, ecs, compare.

#include <openssl/evp.h>
#include <sys/wait.h>
#include <unistd.h>

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "gridflux/baselines.hpp"
#include "gridflux/config_io.hpp"
#include "gridflux/errors.hpp"
#include "gridflux/metrics.hpp"
#include "gridflux/nn/checkpoint.hpp"
#include "gridflux/trainer.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace gridflux {
namespace {

constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

// Options shared by every simulation subcommand.
struct EnvFlags {
  std::string config;
  std::string out_dir;
  std::optional<double> w;
  bool no_time = false;
  bool no_price = false;

  void attach(CLI::App* app) {
    app->add_option("--config", config, "YAML config file");
    app->add_option("--out-dir", out_dir,
                    "output directory (default: $GRIDFLUX_OUT or ./runs)");
    app->add_option("--w", w, "constraint weight w in the reward");
    app->add_flag("--no-time-obs", no_time, "drop time of day from observations");
    app->add_flag("--no-price-obs", no_price, "drop the previous price from observations");
  }

  RunConfig resolve(const std::function<RunConfig()>& fallback = {}) const {
    RunConfig cfg = !config.empty() ? load_config(config)
                    : fallback      ? fallback()
                                    : parse_config("");
    if (w) cfg.env.constraint_weight = *w;
    if (no_time) cfg.env.include_time = false;
    if (no_price) cfg.env.include_price = false;
    cfg.env.finalize();
    cfg.env.validate();
    return cfg;
  }

  fs::path out() const {
    if (!out_dir.empty()) return out_dir;
    if (const char* env = std::getenv("GRIDFLUX_OUT"); env && *env) return env;
    return "runs";
  }
};

std::string command_line(int argc, char** argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) {
    if (i) s += ' ';
    s += argv[i];
  }
  return s;
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

// Same digest `git hash-object` would give the text.
std::string git_blob_sha1(const std::string& text) {
  const std::string blob = "blob " + std::to_string(text.size()) + '\0' + text;
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(blob.data(), blob.size(), md, &len, EVP_sha1(), nullptr);
  std::string hex;
  char b[3];
  for (unsigned i = 0; i < len; ++i) {
    std::snprintf(b, sizeof b, "%02x", md[i]);
    hex += b;
  }
  return hex;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

// The manifest is written once, before any other artifact.
void write_manifest(const fs::path& dir, const std::string& cmd,
                    const std::string& subcommand, const std::string& config_text,
                    const std::vector<std::uint64_t>& seeds,
                    const std::vector<std::string>& artifacts) {
  json m;
  m["command_line"] = cmd;
  m["subcommand"] = subcommand;
  m["start_time"] = utc_now();
  m["seeds"] = seeds;
  m["config_file"] = "config.resolved.yaml";
  m["config"] = config_text;
  m["config_hash"] = git_blob_sha1(config_text);
  m["artifacts"] = artifacts;
  write_text(dir / "manifest.json", m.dump(2) + "\n");
  write_text(dir / "config.resolved.yaml", config_text);
}

std::string seed_suffix(std::uint64_t seed) {
  return "_seed" + std::to_string(seed);
}

// --- train -----------------------------------------------------------------

struct TrainFlags {
  EnvFlags env;
  std::string algo = "mappo";
  int iterations = 0;
  std::vector<std::uint64_t> seeds;
  bool share = false;
  bool parallel = false;
};

void train_one(const RunConfig& cfg, int iterations, std::uint64_t seed,
               const fs::path& dir) {
  const fs::path metrics = dir / ("metrics" + seed_suffix(seed) + ".csv");
  const fs::path profile = dir / ("energy_profile" + seed_suffix(seed) + ".csv");
  // a rerun into the same directory starts the files over
  fs::remove(metrics);
  fs::remove(profile);
  write_metrics_header(metrics);
  write_profile_header(profile);
  Trainer trainer(cfg.env, cfg.train, seed);
  const int every = cfg.train.checkpoint_every;
  trainer.train(iterations, [&](const IterationResult& r) {
    append_metrics(metrics, r.batch.metrics);
    append_profile(profile, r.batch.profile);
    if (every > 0 && r.batch.metrics.iteration % every == 0) {
      trainer.checkpoint().save(
          dir / ("checkpoint" + seed_suffix(seed) + "_iter" +
                 std::to_string(r.batch.metrics.iteration) + ".ckpt"));
    }
  });
  trainer.checkpoint().save(dir / ("checkpoint" + seed_suffix(seed) + ".ckpt"));
}

int cmd_train(const TrainFlags& f, const std::string& cmd) {
  RunConfig cfg = f.env.resolve();
  if (f.algo == "mappo") {
    cfg.train.algo = Algo::kPpo;
    cfg.train.critic_mode = CriticMode::kCentral;
  } else if (f.algo == "dppo") {
    cfg.train.algo = Algo::kPpo;
    cfg.train.critic_mode = CriticMode::kDecentral;
  } else {
    cfg.train.algo = Algo::kA2c;
    cfg.train.critic_mode = CriticMode::kDecentral;
  }
  if (f.share) cfg.train.policy_groups = paired_policy_groups(cfg.env.n_households);
  cfg.train.validate(cfg.env.n_households);
  if (f.iterations < 0) throw ConfigError("--iterations must be >= 0");

  const fs::path dir = f.env.out();
  fs::create_directories(dir);
  std::vector<std::string> artifacts;
  for (auto s : f.seeds) {
    artifacts.push_back("metrics" + seed_suffix(s) + ".csv");
    artifacts.push_back("energy_profile" + seed_suffix(s) + ".csv");
    artifacts.push_back("checkpoint" + seed_suffix(s) + ".ckpt");
  }
  write_manifest(dir, cmd, "train", dump_config(cfg), f.seeds, artifacts);

  if (!f.parallel || f.seeds.size() < 2) {
    for (auto s : f.seeds) train_one(cfg, f.iterations, s, dir);
    return 0;
  }
  std::vector<pid_t> children;
  for (auto s : f.seeds) {
    std::cout.flush();
    const pid_t pid = fork();
    if (pid < 0) throw std::runtime_error("fork failed");
    if (pid == 0) {
      int code = 0;
      try {
        train_one(cfg, f.iterations, s, dir);
      } catch (const std::exception& e) {
        std::cerr << "seed " << s << ": " << e.what() << "\n";
        code = kExitRuntime;
      }
      std::_Exit(code);
    }
    children.push_back(pid);
  }
  int result = 0;
  for (pid_t pid : children) {
    int status = 0;
    waitpid(pid, &status, 0);
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) result = kExitRuntime;
  }
  return result;
}

// --- baseline --------------------------------------------------------------

struct BaselineFlags {
  EnvFlags env;
  std::string policy;
  int days = 105;
  std::uint64_t seed = 0;
};

int cmd_baseline(const BaselineFlags& f, const std::string& cmd) {
  const RunConfig cfg = f.env.resolve();
  if (f.days < 1) throw ConfigError("--days must be >= 1");
  const auto policy = f.policy == "zero" ? baselines::BaselinePolicy::kZero
                                         : baselines::BaselinePolicy::kRandom;
  const fs::path dir = f.env.out();
  fs::create_directories(dir);
  write_manifest(dir, cmd, "baseline " + f.policy, dump_config(cfg), {f.seed},
                 {"metrics.csv", "energy_profile.csv"});
  auto result = baselines::evaluate_baseline(cfg.env, policy, f.days, f.seed);
  result.metrics.iteration = 0;
  result.metrics.seed = f.seed;
  result.profile.iteration = 0;
  fs::remove(dir / "metrics.csv");
  fs::remove(dir / "energy_profile.csv");
  write_metrics_header(dir / "metrics.csv");
  append_metrics(dir / "metrics.csv", result.metrics);
  write_profile_header(dir / "energy_profile.csv");
  append_profile(dir / "energy_profile.csv", result.profile);
  return 0;
}

// --- ecs -------------------------------------------------------------------

struct EcsFlags {
  EnvFlags env;
  int days = 105;
  std::uint64_t seed = 0;
};

int cmd_ecs(const EcsFlags& f, const std::string& cmd) {
  const RunConfig cfg = f.env.resolve([] {
    RunConfig c;
    c.env = ecs_comparison_env();
    return c;
  });
  if (cfg.env.price_mode != PriceMode::kQuadratic) {
    throw ConfigError("ecs requires env.price_mode: quadratic");
  }
  if (f.days < 1) throw ConfigError("--days must be >= 1");
  const fs::path dir = f.env.out();
  fs::create_directories(dir);
  write_manifest(dir, cmd, "ecs", dump_config(cfg), {f.seed},
                 {"ecs_schedule.csv", "metrics.csv", "energy_profile.csv"});

  const auto schedule = baselines::ecs_schedule(cfg.env);
  {
    std::ofstream out(dir / "ecs_schedule.csv");
    out << "household,interval_index,wall_clock_label,planned_kwh\n";
    const int h = cfg.env.intervals_per_day;
    for (std::size_t n = 0; n < schedule.energy.size(); ++n) {
      for (int i = 0; i < h; ++i) {
        out << n << ',' << i << ',' << wall_clock_label(i, h) << ','
            << format_double(schedule.energy[n][i]) << '\n';
      }
    }
    if (!out) throw std::runtime_error("cannot write ecs_schedule.csv");
  }
  const auto ev = baselines::ecs_evaluate(schedule, cfg.env, f.days, f.seed);
  IterationMetrics m;
  m.iteration = 0;
  m.seed = f.seed;
  m.avg_reward_per_day = ev.avg_reward_per_day;
  m.avg_cost_per_day = ev.avg_cost_per_day;
  m.avg_energy_per_day = ev.avg_energy_per_day;
  m.par = ev.par;
  // the schedule has no task queue; report the share of demand served
  m.tasks_completed_pct = ev.fulfilled_pct;
  fs::remove(dir / "metrics.csv");
  fs::remove(dir / "energy_profile.csv");
  write_metrics_header(dir / "metrics.csv");
  append_metrics(dir / "metrics.csv", m);
  auto profile = ev.profile;
  profile.iteration = 0;
  write_profile_header(dir / "energy_profile.csv");
  append_profile(dir / "energy_profile.csv", profile);
  return 0;
}

// --- compare ---------------------------------------------------------------

struct CompareFlags {
  std::vector<std::string> files;
  std::string out;
};

int cmd_compare(const CompareFlags& f) {
  if (f.files.size() < 2) throw ConfigError("compare needs at least two metric files");
  std::vector<std::vector<IterationMetrics>> runs;
  for (const auto& p : f.files) runs.push_back(read_metrics(p));

  std::ostringstream csv;
  csv << "iteration,metric,baseline,candidate,baseline_value,candidate_value,"
         "ratio\n";
  const auto& base = runs.front();
  for (std::size_t c = 1; c < runs.size(); ++c) {
    const auto& cand = runs[c];
    const std::size_t rows = std::min(base.size(), cand.size());
    if (base.size() != cand.size()) {
      std::cerr << "warning: " << f.files[0] << " has " << base.size()
                << " rows and " << f.files[c] << " has " << cand.size()
                << "; comparing the first " << rows << "\n";
    }
    for (std::size_t i = 0; i < rows; ++i) {
      const auto& a = base[i];
      const auto& b = cand[i];
      const std::pair<const char*, std::pair<double, double>> metrics[] = {
          {"avg_reward_per_day", {a.avg_reward_per_day, b.avg_reward_per_day}},
          {"avg_cost_per_day", {a.avg_cost_per_day, b.avg_cost_per_day}},
          {"avg_energy_per_day", {a.avg_energy_per_day, b.avg_energy_per_day}},
          {"par", {a.par, b.par}},
          {"tasks_completed_pct", {a.tasks_completed_pct, b.tasks_completed_pct}},
      };
      for (const auto& [name, v] : metrics) {
        const double ratio = v.first != 0.0
                                 ? v.second / v.first
                                 : std::numeric_limits<double>::quiet_NaN();
        csv << b.iteration << ',' << name << ',' << f.files[0] << ','
            << f.files[c] << ',' << format_double(v.first) << ','
            << format_double(v.second) << ',' << format_double(ratio) << '\n';
      }
    }
  }
  if (f.out.empty() || f.out == "-") {
    std::cout << csv.str();
  } else {
    write_text(f.out, csv.str());
  }
  return 0;
}

int run(int argc, char** argv) {
  CLI::App app{"gridflux: microgrid demand-response simulator and trainers"};
  app.require_subcommand(1);
  const std::string cmd = command_line(argc, argv);

  TrainFlags tf;
  auto* train = app.add_subcommand("train", "train MAPPO, decentralized PPO or A2C");
  tf.env.attach(train);
  train->add_option("--algo", tf.algo, "mappo, dppo or a2c")
      ->check(CLI::IsMember({"mappo", "dppo", "a2c"}));
  train->add_option("--iterations", tf.iterations, "training iterations")->required();
  train->add_option("--seed", tf.seeds, "seed; repeat for several runs")->required();
  train->add_flag("--share-policies", tf.share,
                  "households 2i and 2i+1 share one policy");
  train->add_flag("--parallel-seeds", tf.parallel, "one process per seed");

  BaselineFlags bf;
  auto* baseline = app.add_subcommand("baseline", "evaluate a fixed policy");
  bf.env.attach(baseline);
  baseline->add_option("--policy", bf.policy, "zero or random")
      ->required()
      ->check(CLI::IsMember({"zero", "random"}));
  baseline->add_option("--days", bf.days, "simulated days");
  baseline->add_option("--seed", bf.seed, "demand and policy seed");

  EcsFlags ef;
  auto* ecs = app.add_subcommand("ecs", "plan with the ECS scheduler and replay it");
  ef.env.attach(ecs);
  ecs->add_option("--days", ef.days, "simulated days");
  ecs->add_option("--seed", ef.seed, "demand seed");

  CompareFlags cf;
  auto* compare = app.add_subcommand("compare", "compare metric files to the first one");
  compare->add_option("files", cf.files, "metrics CSV files")->required();
  compare->add_option("--out", cf.out, "output CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (train->parsed()) return cmd_train(tf, cmd);
    if (baseline->parsed()) return cmd_baseline(bf, cmd);
    if (ecs->parsed()) return cmd_ecs(ef, cmd);
    return cmd_compare(cf);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace
}  // namespace gridflux

int main(int argc, char** argv) { return gridflux::run(argc, argv); }
