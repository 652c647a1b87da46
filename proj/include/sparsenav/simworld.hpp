#pragma once

// Desk-scale 2D world: a polygonal arena with procedurally textured walls, a unicycle
// robot, a column raycaster producing 99x99 grayscale frames, and the image pipeline that
// turns a frame into left / middle / right 22x33 input vectors.

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sparsenav/encoders.hpp"
#include "sparsenav/steering.hpp"

namespace sparsenav {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Vec2&) const = default;
};

// Texture families, keyed by texture id modulo 4:
//   0 stripes, 1 checker, 2 sinusoid, 3 random-gray blocks ("barcode").
// The id also selects the period; phase shifts the pattern along the wall (meters).
struct Wall {
  Vec2 a;
  Vec2 b;
  int texture = 0;
  double phase = 0.0;
  bool operator==(const Wall&) const = default;
};

struct Bounds {
  Vec2 min;
  Vec2 max;
};

class Arena {
 public:
  // Throws ConfigError if the walls do not form closed loops (every endpoint shared by an
  // even number of wall ends) or a wall is degenerate.
  explicit Arena(std::vector<Wall> walls);

  const std::vector<Wall>& walls() const noexcept { return walls_; }
  const Bounds& bounds() const noexcept { return bounds_; }

  // Even-odd rule over all walls; points inside solid obstacles count as outside.
  bool contains(Vec2 p) const;

  bool operator==(const Arena& o) const { return walls_ == o.walls_; }

 private:
  std::vector<Wall> walls_;
  Bounds bounds_;
};

// Arena documents: {"walls": [[x1, y1, x2, y2, texture, phase], ...]} or the same with
// objects {"x1":..,"y1":..,"x2":..,"y2":..,"texture":..,"phase":..}.
Arena parse_arena(const std::string& json_text);
Arena load_arena(const std::filesystem::path& path);
std::string arena_to_json(const Arena& arena);

// The bundled 5 m x 4 m room with a central obstacle between the route start and end.
const Arena& reference_arena();
const std::string& reference_arena_json();

struct Pose {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;  // radians in (-pi, pi]
  bool operator==(const Pose&) const = default;
};

// Wraps an angle into (-pi, pi].
double normalize_angle(double radians);

inline constexpr int kRawSize = 99;
inline constexpr int kViewSize = 33;
inline constexpr int kCropWidth = 22;
inline constexpr int kCropPixels = kCropWidth * kViewSize;  // 726
inline constexpr double kFieldOfViewDeg = 120.0;
inline constexpr double kCameraHeight = 0.5;  // meters, walls are 1 m tall
inline constexpr double kWallHeight = 1.0;
inline constexpr std::array<int, 3> kCropOffsets = {0, 5, 11};  // left, middle, right

// Wheel speed unit: one unit of v is 2 * pi * 0.0613 m/s (wheel radius 0.0613 m).
inline constexpr double kSpeedUnitMps = 2.0 * 3.14159265358979323846 * 0.0613;

struct RawView {
  std::array<std::uint8_t, kRawSize * kRawSize> pixels{};  // row-major, row 0 at the top
  std::uint8_t at(int row, int col) const { return pixels[static_cast<std::size_t>(row * kRawSize + col)]; }
  bool operator==(const RawView&) const = default;
};

struct ProcessedView {
  std::array<std::uint8_t, kViewSize * kViewSize> full{};
  InputVector left;
  InputVector middle;
  InputVector right;
};

enum class BlurMode : std::uint8_t { Sliding, Tiled };

// Column c looks toward heading - fov/2 + (c + 0.5) * fov / 99 on a planar image
// plane: column 0 is on the clockwise side, so the left crop (offset 0) sees what lies
// clockwise of the heading. This mirror makes the novelty-difference steering rule turn
// toward the familiar side. Throws StateError if the pose is not inside the arena.
RawView render(const Arena& arena, const Pose& pose);

// 3x3 block mean (round half up) to 33x33, 7x7 box blur (sliding with clamped edges, or
// tiled), then left / middle / right column windows starting at kCropOffsets, flattened
// row-major (33 rows x 22 columns).
ProcessedView preprocess(const RawView& raw, BlurMode blur = BlurMode::Sliding);

// Unicycle Euler step: heading first, then translation at v * kSpeedUnitMps.
// Throws std::invalid_argument if dt <= 0.
Pose step(const Pose& pose, const SteeringCommand& cmd, double dt);

double distance_to_segment(Vec2 p, Vec2 a, Vec2 b);

// True iff the closed disc of the given radius touches any wall.
bool check_collision(const Arena& arena, const Pose& pose, double radius);

}  // namespace sparsenav
