#pragma once

// Train / test protocol for one embodied trial and sweeps over encoder configurations.
//
// Training replays a scripted drive and stores the encoded middle field every
// snapshot_period seconds. Testing restarts from the same pose and steers with the
// left/right novelty difference until max_test_time or a collision.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sparsenav/encoders.hpp"
#include "sparsenav/memory.hpp"
#include "sparsenav/simworld.hpp"
#include "sparsenav/steering.hpp"

namespace sparsenav {

struct RouteSegment {
  double duration = 0.0;        // seconds
  double omega = 0.0;           // rad/s
  std::optional<double> v;      // wheel units; v_train when absent
  bool operator==(const RouteSegment&) const = default;
};

struct RouteScript {
  Pose start;
  std::vector<RouteSegment> segments;

  double duration() const;
  bool operator==(const RouteScript&) const = default;
};

// Route documents: {"start": {"x":..,"y":..,"heading":..},
//                   "segments": [{"duration":..,"omega":..,"v":..}, ...]} ("v" optional).
RouteScript parse_route(const std::string& json_text);
RouteScript load_route(const std::filesystem::path& path);
std::string route_to_json(const RouteScript& route);

// The bundled ~12.5 s reference drive through reference_arena().
const RouteScript& reference_route();
const std::string& reference_route_json();

struct TrialConfig {
  EncoderConfig encoder;
  SteeringParams steering;
  double v_train = 0.5;
  double snapshot_period = 0.5;
  std::size_t n_snapshots = 25;
  double success_radius = 2.0;
  // <= 0 selects route duration * (v_train / v_test) * 1.5.
  double max_test_time = 0.0;
  double control_dt = 0.05;
  double robot_radius = 0.2;
  BlurMode blur = BlurMode::Sliding;
  // Seeds the projection matrix (overrides encoder.seed).
  std::uint64_t seed = 0;

  void validate() const;
  double effective_max_test_time(const RouteScript& route) const;
};

struct TimedPose {
  double t = 0.0;
  Pose pose;
  bool operator==(const TimedPose&) const = default;
};

struct NoveltySample {
  double t = 0.0;
  double d_left = 0.0;
  double d_right = 0.0;
  double omega = 0.0;
  bool operator==(const NoveltySample&) const = default;
};

struct TrainingResult {
  MemoryStore store;
  std::vector<TimedPose> trajectory;
};

struct TrialRecord {
  std::vector<TimedPose> train_trajectory;
  std::vector<TimedPose> test_trajectory;
  std::vector<NoveltySample> novelty_trace;
  double final_distance = 0.0;
  bool success = false;
  bool collided = false;
  std::uint64_t seed = 0;
  OpCounts ops;  // summed over every encode and novelty evaluation of the test session

  bool operator==(const TrialRecord&) const = default;
};

// Throws TrainingCollision if the script hits a wall, ConfigError if the script is empty or
// too short for n_snapshots.
TrainingResult run_training(const Arena& arena, const RouteScript& route, const TrialConfig& cfg,
                            const Encoder& encoder);

// Throws StateError on an empty store. start_override replaces the route start pose.
TrialRecord run_test(const Arena& arena, const RouteScript& route, const TrainingResult& training,
                     const TrialConfig& cfg, const Encoder& encoder,
                     const std::optional<Pose>& start_override = std::nullopt);

// Builds the encoder from cfg (matrix seeded by cfg.seed), trains and tests.
TrialRecord run_trial(const Arena& arena, const RouteScript& route, const TrialConfig& cfg);

// Seed of trial `trial` of grid entry `config_index`; depends on nothing else.
std::uint64_t derive_trial_seed(std::uint64_t base_seed, std::size_t config_index, std::size_t trial);

struct SweepRow {
  EncoderConfig encoder;
  std::size_t n_trials = 0;
  double success_rate = 0.0;
  double mean_final_distance = 0.0;
  std::vector<TrialRecord> trials;
};

// Runs n_trials independent trials per grid entry, each with a fresh matrix seed, on up to
// `jobs` worker threads. Results are ordered by (config index, trial index).
// keep_trajectories = false drops per-tick series from the stored records.
std::vector<SweepRow> run_sweep(const Arena& arena, const RouteScript& route,
                                const std::vector<EncoderConfig>& grid, std::size_t n_trials,
                                std::uint64_t seed, const TrialConfig& base = {}, unsigned jobs = 1,
                                bool keep_trajectories = true);

}  // namespace sparsenav
