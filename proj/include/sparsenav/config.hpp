#pragma once

// Run configuration documents for the command-line tool.
//
// {
//   "arena": "path/to/arena.json",      // omitted: bundled reference arena
//   "route": "path/to/route.json",      // omitted: bundled reference route
//   "seed": 0,
//   "out": "runs",
//   "jobs": 1,
//   "trial": {"model": "flyhash", "n_pn": 726, "n_kc": 2000, "kappa": 0.1, "theta": 0.01377,
//             "fixed_fanout": false, "alpha": 1.0, "v_test": 0.2, "v_train": 0.5,
//             "snapshot_period": 0.5, "n_snapshots": 25, "success_radius": 2.0,
//             "max_test_time": 0, "control_dt": 0.05, "robot_radius": 0.2, "blur": "sliding"},
//   "sweep": {"models": ["flyhash"], "n_kc": [500, 2000, 8000, 32000], "kappa": [0.05, 0.1],
//             "n_trials": 20}
// }
//
// Every key is optional; unknown keys are rejected. Relative paths are resolved against
// the directory of the config file.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sparsenav/harness.hpp"

namespace sparsenav {

struct SweepGrid {
  std::vector<Model> models = {Model::FlyHash};
  std::vector<std::size_t> n_kc = {500, 2000, 8000, 32000};
  std::vector<double> kappa = {0.05, 0.1};
  std::size_t n_trials = 20;

  // Cartesian product in (model, n_kc, kappa) order. Perfect memory ignores n_kc and kappa
  // and contributes a single entry.
  std::vector<EncoderConfig> expand(const EncoderConfig& base) const;
};

struct RunConfig {
  std::optional<std::filesystem::path> arena_path;
  std::optional<std::filesystem::path> route_path;
  TrialConfig trial;
  SweepGrid sweep;
  std::filesystem::path out_dir = "runs";
  std::uint64_t seed = 0;
  unsigned jobs = 1;

  Arena load_arena() const;
  RouteScript load_route() const;
};

// Throws ConfigError on malformed JSON, unknown keys, wrong types or invalid values.
RunConfig parse_run_config(const std::string& json_text, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

// Full round-trippable snapshot (paths as given, resolved).
std::string run_config_to_json(const RunConfig& cfg);

// --seed flag, then SPARSENAV_SEED, then the config value. Throws ConfigError if the
// environment value is not an unsigned integer.
std::uint64_t resolve_seed(std::optional<std::uint64_t> flag, std::uint64_t config_seed);

}  // namespace sparsenav
