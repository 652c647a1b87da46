#include "sparsenav/harness.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "sparsenav/errors.hpp"

namespace sparsenav {

namespace {

using json = nlohmann::json;

// Converts a duration to a whole number of ticks; ConfigError if it is not a multiple of dt.
std::size_t ticks_for(double seconds, double dt, const char* what) {
  const double ratio = seconds / dt;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-6) {
    throw ConfigError(std::string(what) + " must be a whole number of control ticks");
  }
  return static_cast<std::size_t>(rounded);
}

SteeringCommand scripted_command(const RouteScript& route, double t, double v_train) {
  double end = 0.0;
  for (const RouteSegment& seg : route.segments) {
    end += seg.duration;
    if (t < end - 1e-9) return {seg.v.value_or(v_train), seg.omega};
  }
  const RouteSegment& last = route.segments.back();
  return {last.v.value_or(v_train), last.omega};
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

// ---------------------------------------------------------------------------
// Routes
// ---------------------------------------------------------------------------

double RouteScript::duration() const {
  double total = 0.0;
  for (const RouteSegment& seg : segments) total += seg.duration;
  return total;
}

RouteScript parse_route(const std::string& json_text) {
  RouteScript route;
  try {
    const json doc = json::parse(json_text);
    const json& start = doc.at("start");
    route.start = {start.at("x").get<double>(), start.at("y").get<double>(),
                   normalize_angle(start.value("heading", 0.0))};
    for (const json& seg : doc.at("segments")) {
      RouteSegment s;
      s.duration = seg.at("duration").get<double>();
      s.omega = seg.value("omega", 0.0);
      if (seg.contains("v")) s.v = seg["v"].get<double>();
      if (!(s.duration > 0.0) || !std::isfinite(s.duration)) throw ConfigError("route segment duration must be positive");
      route.segments.push_back(s);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed route document: ") + e.what());
  }
  return route;
}

RouteScript load_route(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open route file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_route(buf.str());
}

std::string route_to_json(const RouteScript& route) {
  json segs = json::array();
  for (const RouteSegment& s : route.segments) {
    json j{{"duration", s.duration}, {"omega", s.omega}};
    if (s.v) j["v"] = *s.v;
    segs.push_back(j);
  }
  return json{{"start", {{"x", route.start.x}, {"y", route.start.y}, {"heading", route.start.heading}}},
              {"segments", segs}}
      .dump(2);
}

const std::string& reference_route_json() {
  // Two turns over the central block: 12.5 s at v_train = 0.5, about 2.4 m of path
  // ending 2.16 m from the start.
  static const std::string text = R"({
  "start": {"x": -1.6, "y": -1.2, "heading": 0.6},
  "segments": [
    {"duration": 3.0, "omega": 0.0},
    {"duration": 3.0, "omega": -0.4},
    {"duration": 3.0, "omega": 0.0},
    {"duration": 1.5, "omega": 0.4},
    {"duration": 2.0, "omega": 0.0}
  ]
})";
  return text;
}

const RouteScript& reference_route() {
  static const RouteScript route = parse_route(reference_route_json());
  return route;
}

// ---------------------------------------------------------------------------
// TrialConfig
// ---------------------------------------------------------------------------

void TrialConfig::validate() const {
  encoder.validate();
  steering.validate();
  if (!(control_dt > 0.0)) throw ConfigError("control_dt must be positive");
  if (!(snapshot_period > 0.0)) throw ConfigError("snapshot_period must be positive");
  if (n_snapshots == 0) throw ConfigError("n_snapshots must be at least 1");
  if (!(success_radius > 0.0)) throw ConfigError("success_radius must be positive");
  if (!(robot_radius > 0.0)) throw ConfigError("robot_radius must be positive");
  if (!std::isfinite(v_train)) throw ConfigError("v_train must be finite");
  if (max_test_time <= 0.0 && !(steering.v_test > 0.0)) {
    throw ConfigError("automatic max_test_time needs v_test > 0");
  }
  ticks_for(snapshot_period, control_dt, "snapshot_period");
}

double TrialConfig::effective_max_test_time(const RouteScript& route) const {
  if (max_test_time > 0.0) return max_test_time;
  return route.duration() * (v_train / steering.v_test) * 1.5;
}

// ---------------------------------------------------------------------------
// Training and testing
// ---------------------------------------------------------------------------

TrainingResult run_training(const Arena& arena, const RouteScript& route, const TrialConfig& cfg,
                            const Encoder& encoder) {
  cfg.validate();
  if (route.segments.empty()) throw ConfigError("route script has no segments");
  const double dt = cfg.control_dt;
  const std::size_t ticks_per_snapshot = ticks_for(cfg.snapshot_period, dt, "snapshot_period");
  const auto total_ticks = static_cast<std::size_t>(std::llround(route.duration() / dt));
  const std::size_t last_snapshot_tick = (cfg.n_snapshots - 1) * ticks_per_snapshot;
  if (last_snapshot_tick > total_ticks) {
    throw ConfigError("route script is too short for the requested number of snapshots");
  }

  TrainingResult result{MemoryStore(metric_for(encoder.config().model), encoder.config().output_dim()), {}};
  result.trajectory.reserve(total_ticks + 1);

  Pose pose = route.start;
  if (check_collision(arena, pose, cfg.robot_radius) || !arena.contains({pose.x, pose.y})) {
    throw TrainingCollision("route start pose collides with the arena");
  }
  for (std::size_t tick = 0;; ++tick) {
    const double t = static_cast<double>(tick) * dt;
    result.trajectory.push_back({t, pose});
    if (tick % ticks_per_snapshot == 0 && tick <= last_snapshot_tick) {
      const ProcessedView view = preprocess(render(arena, pose), cfg.blur);
      result.store.store_item(encoder.encode(view.middle));
    }
    if (tick == total_ticks) break;
    pose = step(pose, scripted_command(route, t, cfg.v_train), dt);
    if (check_collision(arena, pose, cfg.robot_radius)) {
      std::ostringstream msg;
      msg << "training route collides at t=" << t + dt << " s (" << pose.x << ", " << pose.y << ")";
      throw TrainingCollision(msg.str());
    }
  }
  result.store.freeze();
  return result;
}

TrialRecord run_test(const Arena& arena, const RouteScript& route, const TrainingResult& training,
                     const TrialConfig& cfg, const Encoder& encoder, const std::optional<Pose>& start_override) {
  cfg.validate();
  if (training.store.empty()) throw StateError("run_test: memory store is empty");
  if (training.trajectory.empty()) throw StateError("run_test: training trajectory is empty");

  const double dt = cfg.control_dt;
  const auto max_ticks = static_cast<std::size_t>(std::ceil(cfg.effective_max_test_time(route) / dt - 1e-9));

  TrialRecord rec;
  rec.seed = encoder.config().seed;
  rec.train_trajectory = training.trajectory;
  rec.test_trajectory.reserve(max_ticks + 1);
  rec.novelty_trace.reserve(max_ticks);

  Pose pose = start_override.value_or(route.start);
  pose.heading = normalize_angle(pose.heading);
  rec.test_trajectory.push_back({0.0, pose});
  rec.collided = check_collision(arena, pose, cfg.robot_radius) || !arena.contains({pose.x, pose.y});

  for (std::size_t tick = 0; tick < max_ticks && !rec.collided; ++tick) {
    const double t = static_cast<double>(tick) * dt;
    const ProcessedView view = preprocess(render(arena, pose), cfg.blur);
    const double d_left = evaluate_novelty(training.store, view.left, encoder, &rec.ops).d;
    const double d_right = evaluate_novelty(training.store, view.right, encoder, &rec.ops).d;
    const SteeringCommand cmd = compute_turn(d_left, d_right, cfg.steering);
    rec.novelty_trace.push_back({t, d_left, d_right, cmd.omega});
    pose = step(pose, cmd, dt);
    rec.test_trajectory.push_back({t + dt, pose});
    rec.collided = check_collision(arena, pose, cfg.robot_radius);
  }

  const Pose& train_end = training.trajectory.back().pose;
  rec.final_distance = std::hypot(pose.x - train_end.x, pose.y - train_end.y);
  rec.success = rec.final_distance < cfg.success_radius;
  return rec;
}

TrialRecord run_trial(const Arena& arena, const RouteScript& route, const TrialConfig& cfg) {
  EncoderConfig ecfg = cfg.encoder;
  ecfg.seed = cfg.seed;
  const Encoder encoder(ecfg);
  const TrainingResult training = run_training(arena, route, cfg, encoder);
  return run_test(arena, route, training, cfg, encoder);
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

std::uint64_t derive_trial_seed(std::uint64_t base_seed, std::size_t config_index, std::size_t trial) {
  return splitmix64(splitmix64(splitmix64(base_seed) ^ config_index) ^ trial);
}

std::vector<SweepRow> run_sweep(const Arena& arena, const RouteScript& route, const std::vector<EncoderConfig>& grid,
                                std::size_t n_trials, std::uint64_t seed, const TrialConfig& base, unsigned jobs,
                                bool keep_trajectories) {
  if (grid.empty()) throw std::invalid_argument("run_sweep: empty grid");
  if (n_trials == 0) throw std::invalid_argument("run_sweep: n_trials must be at least 1");
  for (const EncoderConfig& e : grid) e.validate();

  std::vector<SweepRow> rows(grid.size());
  for (std::size_t c = 0; c < grid.size(); ++c) {
    rows[c].encoder = grid[c];
    rows[c].n_trials = n_trials;
    rows[c].trials.resize(n_trials);
  }

  const std::size_t total = grid.size() * n_trials;
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (std::size_t job = next.fetch_add(1); job < total; job = next.fetch_add(1)) {
      const std::size_t c = job / n_trials;
      const std::size_t trial = job % n_trials;
      try {
        TrialConfig cfg = base;
        cfg.encoder = grid[c];
        cfg.seed = derive_trial_seed(seed, c, trial);
        TrialRecord rec = run_trial(arena, route, cfg);
        if (!keep_trajectories) {
          rec.train_trajectory = {rec.train_trajectory.back()};
          rec.test_trajectory = {rec.test_trajectory.back()};
          rec.novelty_trace.clear();
        }
        rows[c].trials[trial] = std::move(rec);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(total);
      }
    }
  };

  const unsigned n_workers = std::max(1U, std::min<unsigned>(jobs, static_cast<unsigned>(total)));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < n_workers; ++i) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  for (SweepRow& row : rows) {
    std::size_t successes = 0;
    double distance_sum = 0.0;
    for (const TrialRecord& rec : row.trials) {
      successes += rec.success ? 1 : 0;
      distance_sum += rec.final_distance;
    }
    row.success_rate = static_cast<double>(successes) / static_cast<double>(n_trials);
    row.mean_final_distance = distance_sum / static_cast<double>(n_trials);
  }
  return rows;
}

}  // namespace sparsenav
