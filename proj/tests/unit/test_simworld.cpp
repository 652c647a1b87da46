#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "sparsenav/errors.hpp"
#include "sparsenav/simworld.hpp"

using namespace sparsenav;

namespace {

constexpr double kPi = std::numbers::pi;

RawView mirrored(const RawView& v) {
  RawView m;
  for (int r = 0; r < kRawSize; ++r) {
    for (int c = 0; c < kRawSize; ++c) {
      m.pixels[static_cast<std::size_t>(r * kRawSize + c)] = v.at(r, kRawSize - 1 - c);
    }
  }
  return m;
}

InputVector reverse_columns(const InputVector& crop) {
  InputVector out(crop.size());
  for (int r = 0; r < kViewSize; ++r) {
    for (int c = 0; c < kCropWidth; ++c) {
      out[static_cast<std::size_t>(r * kCropWidth + c)] = crop[static_cast<std::size_t>(r * kCropWidth + kCropWidth - 1 - c)];
    }
  }
  return out;
}

const std::string kSquare = R"({"walls": [[0,0,4,0,0,0],[4,0,4,4,1,0],[4,4,0,4,2,0],[0,4,0,0,3,0]]})";

}  // namespace

TEST(Arena, ParsesBothWallForms) {
  const Arena a = parse_arena(kSquare);
  EXPECT_EQ(a.walls().size(), 4u);
  const Arena b = parse_arena(
      R"({"walls": [{"x1":0,"y1":0,"x2":4,"y2":0,"texture":0},{"x1":4,"y1":0,"x2":4,"y2":4,"texture":1},
                    {"x1":4,"y1":4,"x2":0,"y2":4,"texture":2},{"x1":0,"y1":4,"x2":0,"y2":0,"texture":3}]})");
  EXPECT_EQ(a, b);
  EXPECT_EQ(parse_arena(arena_to_json(reference_arena())), reference_arena());
}

TEST(Arena, RejectsBadDocuments) {
  EXPECT_THROW(parse_arena("not json"), ConfigError);
  EXPECT_THROW(parse_arena(R"({"walls": 3})"), ConfigError);
  EXPECT_THROW(parse_arena(R"({"walls": [[0,0,1,0,0,0],[1,0,1,1,0,0],[1,1,0,1,0,0]]})"), ConfigError);  // open
  EXPECT_THROW(parse_arena(R"({"walls": [[0,0,0,0,0,0],[0,0,1,0,0,0],[1,0,0,0,0,0]]})"), ConfigError);  // degenerate
  EXPECT_THROW(parse_arena(R"({"walls": [[0,0,1,0,0]]})"), ConfigError);
  EXPECT_THROW(load_arena("/nonexistent/arena.json"), ConfigError);
}

TEST(Arena, ContainsExcludesObstacleInteriors) {
  const Arena& a = reference_arena();
  EXPECT_TRUE(a.contains({0.0, 0.5}));
  EXPECT_FALSE(a.contains({3.0, 0.0}));
  EXPECT_FALSE(a.contains({-0.4, -0.25}));  // inside a block
  EXPECT_FALSE(a.contains({-0.8, -1.4}));   // inside the central block
}

TEST(Arena, ReferenceHasObstacleOnTheDirectLine) {
  // The segment from route start to route end passes through the central block.
  const Arena& a = reference_arena();
  const Vec2 s{-1.6, -1.2}, e{0.56, -1.29};
  bool blocked = false;
  for (int i = 0; i <= 100; ++i) {
    const double t = i / 100.0;
    if (!a.contains({s.x + t * (e.x - s.x), s.y + t * (e.y - s.y)})) blocked = true;
  }
  EXPECT_TRUE(blocked);
}

TEST(Kinematics, NormalizeAngle) {
  EXPECT_DOUBLE_EQ(normalize_angle(kPi), kPi);
  EXPECT_DOUBLE_EQ(normalize_angle(-kPi), kPi);
  EXPECT_NEAR(normalize_angle(3 * kPi / 2), -kPi / 2, 1e-12);
  for (double a = -20; a < 20; a += 0.37) {
    const double n = normalize_angle(a);
    EXPECT_GT(n, -kPi);
    EXPECT_LE(n, kPi);
    EXPECT_NEAR(std::remainder(n - a, 2 * kPi), 0.0, 1e-9);
  }
}

TEST(Kinematics, StraightLineSpeedUnit) {
  const Pose p = step({0, 0, 0.3}, {0.5, 0.0}, 1.0);
  EXPECT_NEAR(std::hypot(p.x, p.y), 0.5 * 2 * kPi * 0.0613, 1e-12);
  EXPECT_NEAR(std::hypot(p.x, p.y), 0.1926, 1e-4);
  EXPECT_NEAR(std::atan2(p.y, p.x), 0.3, 1e-12);
}

TEST(Kinematics, PureRotation) {
  const Pose p = step({1, 2, 0.1}, {0.0, 0.7}, 0.5);
  EXPECT_EQ(p.x, 1.0);
  EXPECT_EQ(p.y, 2.0);
  EXPECT_NEAR(p.heading, 0.45, 1e-12);
  EXPECT_THROW(step({}, {0.1, 0.0}, 0.0), std::invalid_argument);
  EXPECT_THROW(step({}, {0.1, 0.0}, -1.0), std::invalid_argument);
}

TEST(Kinematics, CircularArcOracle) {
  const double v = 0.2, w = 0.1, dt = 0.005;
  const double speed = v * 2 * kPi * 0.0613;
  const double radius = speed / w;
  const Pose start{0.3, -0.2, 0.4};
  Pose p = start;
  double worst = 0.0;
  for (int i = 1; i <= 10000; ++i) {
    p = step(p, {v, w}, dt);
    const double th = start.heading + w * dt * i;
    const double x = start.x + radius * (std::sin(th) - std::sin(start.heading));
    const double y = start.y - radius * (std::cos(th) - std::cos(start.heading));
    worst = std::max(worst, std::hypot(p.x - x, p.y - y));
  }
  EXPECT_LT(worst, 0.01 * radius);
}

TEST(Collision, Examples) {
  const Arena& a = reference_arena();
  EXPECT_FALSE(check_collision(a, {0.0, 0.5, 0.0}, 0.2));
  EXPECT_TRUE(check_collision(a, {2.5, 0.0, 0.0}, 0.2));
  const Arena sq = parse_arena(kSquare);
  EXPECT_TRUE(check_collision(sq, {0.25, 2.0, 0.0}, 0.25));  // exactly touching
  EXPECT_FALSE(check_collision(sq, {0.25, 2.0, 0.0}, 0.2499));
  EXPECT_THROW(check_collision(sq, {2, 2, 0}, 0.0), std::invalid_argument);
  EXPECT_DOUBLE_EQ(distance_to_segment({0, 1}, {-1, 0}, {1, 0}), 1.0);
  EXPECT_DOUBLE_EQ(distance_to_segment({3, 4}, {0, 0}, {0, 0}), 5.0);
}

TEST(Render, DeterministicAndPeriodicInHeading) {
  const Arena& a = reference_arena();
  const Pose p{-1.0, 0.5, 0.8};
  EXPECT_EQ(render(a, p), render(a, p));
  EXPECT_EQ(render(a, p), render(a, {p.x, p.y, normalize_angle(p.heading + 2 * kPi)}));
}

TEST(Render, OutsideArenaIsStateError) {
  EXPECT_THROW(render(reference_arena(), {3.0, 0.0, 0.0}), StateError);
  EXPECT_THROW(render(reference_arena(), {-0.4, -0.25, 0.0}), StateError);
}

TEST(Render, NearbyPosesDiffer) {
  const Arena& a = reference_arena();
  for (const Pose& p : {Pose{-1.6, -1.2, 0.6}, Pose{0.0, 0.8, 0.0}, Pose{1.0, -1.2, 2.0}}) {
    const RawView v1 = render(a, p);
    const RawView v2 = render(a, {p.x + 0.5 * std::cos(p.heading), p.y + 0.5 * std::sin(p.heading), p.heading});
    std::size_t diff = 0;
    for (std::size_t i = 0; i < v1.pixels.size(); ++i) diff += v1.pixels[i] != v2.pixels[i];
    EXPECT_GE(diff, v1.pixels.size() / 100);
  }
}

TEST(Render, FloorBelowCeilingAbove) {
  const RawView v = render(reference_arena(), {0.0, 0.5, 0.0});
  for (int c = 0; c < kRawSize; ++c) {
    EXPECT_EQ(v.at(0, c), 110);
    EXPECT_EQ(v.at(kRawSize - 1, c), 50);
  }
}

TEST(Render, CloserWallFillsTallerBand) {
  const Arena sq = parse_arena(kSquare);
  auto band = [&](double x) {
    const RawView v = render(sq, {x, 2.0, 0.0});  // facing the x = 4 wall
    int rows = 0;
    for (int r = 0; r < kRawSize; ++r) rows += v.at(r, kRawSize / 2) != 110 && v.at(r, kRawSize / 2) != 50;
    return rows;
  };
  EXPECT_GT(band(3.0), band(1.0));
}

TEST(Render, ColumnZeroIsClockwiseOfHeading) {
  // Corridor along +x; the clockwise wall (y = 0) is three times closer than the other one,
  // so its band is taller at column 0 than the far wall's band at the last column.
  const Arena corridor = parse_arena(R"({"walls": [[0,0,10,0,0,0],[10,0,10,1,1,0],[10,1,0,1,2,0],[0,1,0,0,3,0]]})");
  const RawView v = render(corridor, {1.0, 0.25, 0.0});
  auto band = [&](int col) {
    int rows = 0;
    for (int r = 0; r < kRawSize; ++r) rows += v.at(r, col) != 110 && v.at(r, col) != 50;
    return rows;
  };
  EXPECT_GT(band(0), band(kRawSize - 1) + 20);
}

TEST(Preprocess, ConstantImageStaysConstant) {
  RawView raw;
  raw.pixels.fill(100);
  for (BlurMode mode : {BlurMode::Sliding, BlurMode::Tiled}) {
    const ProcessedView v = preprocess(raw, mode);
    for (auto px : v.full) EXPECT_EQ(px, 100);
    for (const InputVector* crop : {&v.left, &v.middle, &v.right}) {
      ASSERT_EQ(crop->size(), 726u);
      for (auto px : *crop) EXPECT_EQ(px, 100);
    }
  }
}

TEST(Preprocess, CropsAreColumnWindows) {
  const ProcessedView v = preprocess(render(reference_arena(), {-1.6, -1.2, 0.6}));
  for (int r = 0; r < kViewSize; ++r) {
    for (int c = 0; c < kCropWidth; ++c) {
      const auto at = [&](int col) { return v.full[static_cast<std::size_t>(r * kViewSize + col)]; };
      const auto i = static_cast<std::size_t>(r * kCropWidth + c);
      EXPECT_EQ(v.left[i], at(c + 0));
      EXPECT_EQ(v.middle[i], at(c + 5));
      EXPECT_EQ(v.right[i], at(c + 11));
    }
  }
}

TEST(Preprocess, MirroredImageSwapsLeftAndRight) {
  for (const Pose& p : {Pose{-1.6, -1.2, 0.6}, Pose{0.5, 0.8, -2.0}}) {
    const RawView raw = render(reference_arena(), p);
    const ProcessedView v = preprocess(raw);
    const ProcessedView m = preprocess(mirrored(raw));
    EXPECT_EQ(m.left, reverse_columns(v.right));
    EXPECT_EQ(m.right, reverse_columns(v.left));
  }
}

TEST(Preprocess, BlockMeanAndBlurOracle) {
  // Independent float reference for the sliding pipeline, rounded half up.
  const RawView raw = render(reference_arena(), {0.2, 0.9, 1.1});
  int small[33][33];
  for (int r = 0; r < 33; ++r) {
    for (int c = 0; c < 33; ++c) {
      double s = 0;
      for (int i = 0; i < 9; ++i) s += raw.at(3 * r + i / 3, 3 * c + i % 3);
      small[r][c] = static_cast<int>(std::floor(s / 9.0 + 0.5));
    }
  }
  const ProcessedView v = preprocess(raw);
  for (int r = 0; r < 33; ++r) {
    for (int c = 0; c < 33; ++c) {
      double s = 0;
      for (int dr = -3; dr <= 3; ++dr) {
        for (int dc = -3; dc <= 3; ++dc) s += small[std::clamp(r + dr, 0, 32)][std::clamp(c + dc, 0, 32)];
      }
      EXPECT_EQ(v.full[static_cast<std::size_t>(r * 33 + c)], static_cast<int>(std::floor(s / 49.0 + 0.5)));
    }
  }
}

TEST(Preprocess, TrainingAndTestPipelinesAgree) {
  const Pose p{-0.3, 0.6, 2.4};
  EXPECT_EQ(preprocess(render(reference_arena(), p)).middle, preprocess(render(reference_arena(), p)).middle);
}
