#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "sparsenav/errors.hpp"
#include "sparsenav/harness.hpp"

using namespace sparsenav;

namespace {

TrialConfig short_config(Model model, std::size_t n_kc = 1000) {
  TrialConfig cfg;
  cfg.encoder.model = model;
  cfg.encoder.n_kc = n_kc;
  cfg.max_test_time = 5.0;
  return cfg;
}

const std::string kOtherArena = R"({"walls": [[-3,-3,3,-3,5,0],[3,-3,3,3,6,0],[3,3,-3,3,7,0],[-3,3,-3,-3,8,0]]})";

}  // namespace

TEST(Route, ParseAndRoundTrip) {
  const RouteScript r = reference_route();
  EXPECT_NEAR(r.duration(), 12.5, 1e-12);
  EXPECT_EQ(parse_route(route_to_json(r)), r);
  const RouteScript v = parse_route(R"({"start": {"x": 0, "y": 0}, "segments": [{"duration": 2, "v": 0.3}]})");
  ASSERT_TRUE(v.segments[0].v.has_value());
  EXPECT_EQ(*v.segments[0].v, 0.3);
  EXPECT_EQ(v.segments[0].omega, 0.0);
}

TEST(Route, RejectsBadDocuments) {
  EXPECT_THROW(parse_route("{}"), ConfigError);
  EXPECT_THROW(parse_route(R"({"start": {"x": 0, "y": 0}, "segments": [{"duration": -1}]})"), ConfigError);
  EXPECT_THROW(parse_route(R"({"start": {"x": 0}, "segments": []})"), ConfigError);
  EXPECT_THROW(load_route("/nonexistent/route.json"), ConfigError);
}

TEST(TrialConfig, DefaultsAndMaxTestTime) {
  const TrialConfig cfg;
  EXPECT_EQ(cfg.v_train, 0.5);
  EXPECT_EQ(cfg.steering.v_test, 0.2);
  EXPECT_EQ(cfg.steering.alpha, 1.0);
  EXPECT_EQ(cfg.snapshot_period, 0.5);
  EXPECT_EQ(cfg.n_snapshots, 25u);
  EXPECT_EQ(cfg.success_radius, 2.0);
  EXPECT_EQ(cfg.encoder.n_pn, 726u);
  EXPECT_NEAR(cfg.effective_max_test_time(reference_route()), 12.5 * 2.5 * 1.5, 1e-9);
  TrialConfig bad = cfg;
  bad.snapshot_period = 0.52;  // not a multiple of the control tick
  EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(Training, StoresTwentyFiveSnapshots) {
  const TrialConfig cfg = short_config(Model::PerfectMemory);
  const Encoder enc(cfg.encoder);
  const TrainingResult tr = run_training(reference_arena(), reference_route(), cfg, enc);
  EXPECT_EQ(tr.store.size(), 25u);
  EXPECT_TRUE(tr.store.frozen());
  EXPECT_EQ(tr.trajectory.size(), 251u);
  EXPECT_EQ(tr.trajectory.front().pose, reference_route().start);
  // Snapshot k is the middle field at t = 0.5 k.
  const Pose p = tr.trajectory[30].pose;
  EXPECT_NEAR(tr.trajectory[30].t, 1.5, 1e-12);
  EXPECT_EQ(std::get<InputVector>(tr.store.items()[3]), preprocess(render(reference_arena(), p)).middle);
}

TEST(Training, DeterministicInSeed) {
  TrialConfig cfg = short_config(Model::FlyHash);
  cfg.encoder.seed = 3;
  const Encoder enc(cfg.encoder);
  const TrainingResult a = run_training(reference_arena(), reference_route(), cfg, enc);
  const TrainingResult b = run_training(reference_arena(), reference_route(), cfg, Encoder(cfg.encoder));
  EXPECT_EQ(a.store, b.store);
}

TEST(Training, Errors) {
  const TrialConfig cfg = short_config(Model::PerfectMemory);
  const Encoder enc(cfg.encoder);
  RouteScript empty = reference_route();
  empty.segments.clear();
  EXPECT_THROW(run_training(reference_arena(), empty, cfg, enc), ConfigError);

  RouteScript shortr = reference_route();
  shortr.segments = {{5.0, 0.0, std::nullopt}};
  EXPECT_THROW(run_training(reference_arena(), shortr, cfg, enc), ConfigError);

  RouteScript crash;
  crash.start = {0.0, -1.5, -1.5707963};
  crash.segments = {{12.5, 0.0, std::nullopt}};
  EXPECT_THROW(run_training(reference_arena(), crash, cfg, enc), TrainingCollision);
}

TEST(Test, EmptyStoreIsStateError) {
  const TrialConfig cfg = short_config(Model::PerfectMemory);
  const Encoder enc(cfg.encoder);
  TrainingResult tr{MemoryStore(Metric::Euclidean, 726), {{0.0, reference_route().start}}};
  EXPECT_THROW(run_test(reference_arena(), reference_route(), tr, cfg, enc), StateError);
}

TEST(Test, RecordInvariants) {
  TrialConfig cfg = short_config(Model::FlyHash, 2000);
  cfg.max_test_time = 0.0;
  cfg.seed = 11;
  const TrialRecord rec = run_trial(reference_arena(), reference_route(), cfg);
  const Pose& a = rec.train_trajectory.back().pose;
  const Pose& b = rec.test_trajectory.back().pose;
  EXPECT_DOUBLE_EQ(rec.final_distance, std::hypot(a.x - b.x, a.y - b.y));
  EXPECT_EQ(rec.success, rec.final_distance < cfg.success_radius);
  EXPECT_EQ(rec.seed, 11u);
  EXPECT_EQ(rec.novelty_trace.size() + 1, rec.test_trajectory.size());
  for (const NoveltySample& s : rec.novelty_trace) {
    EXPECT_LE(std::abs(s.omega), cfg.steering.alpha);
    EXPECT_DOUBLE_EQ(s.omega, compute_turn(s.d_left, s.d_right, cfg.steering).omega);
  }
  if (!rec.collided) {
    const double t_end = rec.test_trajectory.back().t;
    const double t_max = cfg.effective_max_test_time(reference_route());
    EXPECT_GE(t_end, t_max - 1e-9);
    EXPECT_LT(t_end, t_max + cfg.control_dt);
  }
  EXPECT_GT(rec.ops.eval_xor, 0u);
}

TEST(Test, ForeignStoreDoesNotCrash) {
  const TrialConfig cfg = short_config(Model::PerfectMemory);
  const Encoder enc(cfg.encoder);
  const Arena other = parse_arena(kOtherArena);
  RouteScript r = reference_route();
  const TrainingResult tr = run_training(other, r, cfg, enc);
  EXPECT_NO_THROW(run_test(reference_arena(), r, tr, cfg, enc));
}

TEST(Test, CollisionFreezesPose) {
  TrialConfig cfg = short_config(Model::PerfectMemory);
  cfg.max_test_time = 60.0;
  const Encoder enc(cfg.encoder);
  const TrainingResult tr = run_training(reference_arena(), reference_route(), cfg, enc);
  // Start facing the south wall, 0.05 m of travel away.
  const TrialRecord rec = run_test(reference_arena(), reference_route(), tr, cfg, enc, Pose{1.8, -1.75, -1.5707963});
  ASSERT_TRUE(rec.collided);
  EXPECT_TRUE(check_collision(reference_arena(), rec.test_trajectory.back().pose, cfg.robot_radius));
  EXPECT_FALSE(check_collision(reference_arena(), rec.test_trajectory[rec.test_trajectory.size() - 2].pose,
                               cfg.robot_radius));
  EXPECT_LT(rec.test_trajectory.back().t, 60.0);
}

TEST(Sweep, SeedsDependOnlyOnIndices) {
  EXPECT_EQ(derive_trial_seed(1, 2, 3), derive_trial_seed(1, 2, 3));
  EXPECT_NE(derive_trial_seed(1, 2, 3), derive_trial_seed(1, 3, 2));
  EXPECT_NE(derive_trial_seed(1, 0, 0), derive_trial_seed(2, 0, 0));
}

TEST(Sweep, Errors) {
  EXPECT_THROW(run_sweep(reference_arena(), reference_route(), {}, 3, 0), std::invalid_argument);
  EXPECT_THROW(run_sweep(reference_arena(), reference_route(), {EncoderConfig{}}, 0, 0), std::invalid_argument);
}

TEST(Sweep, IndependentOfWorkerCountAndReplayable) {
  TrialConfig base = short_config(Model::FlyHash);
  std::vector<EncoderConfig> grid(2);
  grid[0].n_kc = 500;
  grid[1].n_kc = 800;
  const auto serial = run_sweep(reference_arena(), reference_route(), grid, 3, 99, base, 1);
  const auto parallel = run_sweep(reference_arena(), reference_route(), grid, 3, 99, base, 4);
  ASSERT_EQ(serial.size(), 2u);
  for (std::size_t c = 0; c < 2; ++c) {
    ASSERT_EQ(serial[c].trials.size(), 3u);
    for (std::size_t t = 0; t < 3; ++t) {
      EXPECT_EQ(serial[c].trials[t], parallel[c].trials[t]);
      // Any single trial can be regenerated alone, in any order.
      TrialConfig cfg = base;
      cfg.encoder = grid[c];
      cfg.seed = derive_trial_seed(99, c, t);
      EXPECT_EQ(run_trial(reference_arena(), reference_route(), cfg), serial[c].trials[t]);
    }
    double mean = 0;
    std::size_t wins = 0;
    for (const auto& rec : serial[c].trials) {
      mean += rec.final_distance / 3.0;
      wins += rec.success;
    }
    EXPECT_DOUBLE_EQ(serial[c].mean_final_distance, mean);
    EXPECT_DOUBLE_EQ(serial[c].success_rate, wins / 3.0);
  }
}

TEST(Sweep, PerfectMemoryAlwaysSucceeds) {
  EncoderConfig pm;
  pm.model = Model::PerfectMemory;
  TrialConfig base;
  const auto rows = run_sweep(reference_arena(), reference_route(), {pm}, 2, 5, base, 1, false);
  EXPECT_EQ(rows[0].success_rate, 1.0);
  // Trajectories dropped: only end points remain.
  EXPECT_EQ(rows[0].trials[0].test_trajectory.size(), 1u);
}
