#include "sparsenav/simworld.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "sparsenav/errors.hpp"

namespace sparsenav {

namespace {

using json = nlohmann::json;

constexpr double kPi = std::numbers::pi;
constexpr std::uint8_t kFloorGray = 50;
constexpr std::uint8_t kCeilingGray = 110;

double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
Vec2 sub(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }

std::uint32_t mix32(std::uint32_t h) {
  h ^= h >> 16;
  h *= 0x7feb352dU;
  h ^= h >> 15;
  h *= 0x846ca68bU;
  h ^= h >> 16;
  return h;
}

// Texture value in [0, 255] at distance u (m) along the wall and height fraction v in [0, 1].
double texture_value(int texture, double u, double v) {
  const int family = ((texture % 4) + 4) % 4;
  const int variant = std::abs(texture / 4);
  switch (family) {
    case 0: {  // stripes
      const double half = 0.5 * (0.3 + 0.1 * (variant % 4));
      return (static_cast<long long>(std::floor(u / half)) & 1) ? 220.0 : 40.0;
    }
    case 1: {  // checker, two rows
      const double cell = 0.25 + 0.05 * (variant % 3);
      const auto parity = static_cast<long long>(std::floor(u / cell)) + (v < 0.5 ? 0 : 1);
      return (parity & 1) ? 200.0 : 60.0;
    }
    case 2: {  // sinusoid
      const double period = 0.6 + 0.2 * (variant % 3);
      return 130.0 + 100.0 * std::sin(2.0 * kPi * u / period);
    }
    default: {  // random-gray blocks
      const double width = 0.2 + 0.05 * (variant % 3);
      const auto block = static_cast<std::int64_t>(std::floor(u / width));
      const std::uint32_t h = mix32(static_cast<std::uint32_t>(texture) * 0x9e3779b9U ^
                                    static_cast<std::uint32_t>(block) * 0x85ebca6bU);
      return 30.0 + static_cast<double>(h % 201U);
    }
  }
}

Wall wall_from_json(const json& j) {
  Wall w;
  if (j.is_array()) {
    if (j.size() != 6) throw ConfigError("arena wall arrays need 6 entries: x1, y1, x2, y2, texture, phase");
    w.a = {j[0].get<double>(), j[1].get<double>()};
    w.b = {j[2].get<double>(), j[3].get<double>()};
    w.texture = j[4].get<int>();
    w.phase = j[5].get<double>();
  } else if (j.is_object()) {
    w.a = {j.at("x1").get<double>(), j.at("y1").get<double>()};
    w.b = {j.at("x2").get<double>(), j.at("y2").get<double>()};
    w.texture = j.value("texture", 0);
    w.phase = j.value("phase", 0.0);
  } else {
    throw ConfigError("arena wall must be an array or an object");
  }
  return w;
}

}  // namespace

// ---------------------------------------------------------------------------
// Arena
// ---------------------------------------------------------------------------

Arena::Arena(std::vector<Wall> walls) : walls_(std::move(walls)) {
  if (walls_.size() < 3) throw ConfigError("arena needs at least three walls");
  std::map<std::pair<double, double>, int> ends;
  bounds_.min = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  bounds_.max = {-bounds_.min.x, -bounds_.min.y};
  for (const Wall& w : walls_) {
    if (!std::isfinite(w.a.x) || !std::isfinite(w.a.y) || !std::isfinite(w.b.x) || !std::isfinite(w.b.y) ||
        !std::isfinite(w.phase)) {
      throw ConfigError("arena wall coordinates must be finite");
    }
    if (w.a == w.b) throw ConfigError("arena wall has zero length");
    ++ends[{w.a.x, w.a.y}];
    ++ends[{w.b.x, w.b.y}];
    for (Vec2 p : {w.a, w.b}) {
      bounds_.min = {std::min(bounds_.min.x, p.x), std::min(bounds_.min.y, p.y)};
      bounds_.max = {std::max(bounds_.max.x, p.x), std::max(bounds_.max.y, p.y)};
    }
  }
  for (const auto& [point, count] : ends) {
    if (count % 2 != 0) {
      std::ostringstream msg;
      msg << "arena walls are not closed at (" << point.first << ", " << point.second << ")";
      throw ConfigError(msg.str());
    }
  }
}

bool Arena::contains(Vec2 p) const {
  bool inside = false;
  for (const Wall& w : walls_) {
    if ((w.a.y > p.y) != (w.b.y > p.y)) {
      const double x_cross = w.a.x + (p.y - w.a.y) * (w.b.x - w.a.x) / (w.b.y - w.a.y);
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

Arena parse_arena(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("arena document is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("walls") || !doc["walls"].is_array()) {
    throw ConfigError("arena document needs a 'walls' array");
  }
  std::vector<Wall> walls;
  try {
    for (const auto& item : doc["walls"]) walls.push_back(wall_from_json(item));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed arena wall: ") + e.what());
  }
  return Arena(std::move(walls));
}

Arena load_arena(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open arena file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_arena(buf.str());
}

std::string arena_to_json(const Arena& arena) {
  json walls = json::array();
  for (const Wall& w : arena.walls()) walls.push_back({w.a.x, w.a.y, w.b.x, w.b.y, w.texture, w.phase});
  return json{{"walls", walls}}.dump(2);
}

const std::string& reference_arena_json() {
  // 5 m x 4 m room with five blocks. The reference route bends around the block at
  // (-0.95..-0.7, -1.6..-1.15), which sits on the straight line from route start to end;
  // the 0.4 m gap below it is too narrow for the 0.2 m-radius robot.
  static const std::string text = R"({
  "walls": [
    [-2.50, -2.00,  2.50, -2.00,  4, 0.00],
    [ 2.50, -2.00,  2.50,  2.00,  0, 0.00],
    [ 2.50,  2.00, -2.50,  2.00,  7, 0.00],
    [-2.50,  2.00, -2.50, -2.00, 33, 0.00],

    [-0.95, -1.60, -0.70, -1.60, 11, 0.07],
    [-0.70, -1.60, -0.70, -1.15, 33, 0.36],
    [-0.70, -1.15, -0.95, -1.15, 15, 0.43],
    [-0.95, -1.15, -0.95, -1.60, 21, 0.00],

    [-0.60, -0.45, -0.20, -0.45, 18, 0.00],
    [-0.20, -0.45, -0.20, -0.05,  3, 0.00],
    [-0.20, -0.05, -0.60, -0.05, 40, 0.17],
    [-0.60, -0.05, -0.60, -0.45,  6, 0.00],

    [ 1.20, -0.60,  1.60, -0.60, 10, 0.00],
    [ 1.60, -0.60,  1.60, -0.20, 23, 0.20],
    [ 1.60, -0.20,  1.20, -0.20, 13, 0.00],
    [ 1.20, -0.20,  1.20, -0.60, 35, 0.00],

    [-1.90,  0.80, -1.50,  0.80, 13, 0.13],
    [-1.50,  0.80, -1.50,  1.20,  8, 0.03],
    [-1.50,  1.20, -1.90,  1.20, 40, 0.00],
    [-1.90,  1.20, -1.90,  0.80, 26, 0.00],

    [ 1.40,  0.90,  1.80,  0.90, 13, 0.00],
    [ 1.80,  0.90,  1.80,  1.30, 27, 0.00],
    [ 1.80,  1.30,  1.40,  1.30, 29, 0.03],
    [ 1.40,  1.30,  1.40,  0.90, 22, 0.00]
  ]
})";
  return text;
}

const Arena& reference_arena() {
  static const Arena arena = parse_arena(reference_arena_json());
  return arena;
}

// ---------------------------------------------------------------------------
// Geometry and kinematics
// ---------------------------------------------------------------------------

double normalize_angle(double radians) {
  double a = std::remainder(radians, 2.0 * kPi);  // [-pi, pi]
  if (a <= -kPi) a += 2.0 * kPi;
  return a;
}

Pose step(const Pose& pose, const SteeringCommand& cmd, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
  Pose next = pose;
  next.heading = normalize_angle(pose.heading + cmd.omega * dt);
  const double speed = cmd.v * kSpeedUnitMps;
  next.x += speed * std::cos(next.heading) * dt;
  next.y += speed * std::sin(next.heading) * dt;
  return next;
}

double distance_to_segment(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = sub(b, a);
  const Vec2 ap = sub(p, a);
  const double len_sq = ab.x * ab.x + ab.y * ab.y;
  double t = len_sq > 0.0 ? (ap.x * ab.x + ap.y * ab.y) / len_sq : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const Vec2 closest{a.x + t * ab.x, a.y + t * ab.y};
  return std::hypot(p.x - closest.x, p.y - closest.y);
}

bool check_collision(const Arena& arena, const Pose& pose, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("check_collision: radius must be positive");
  const Vec2 p{pose.x, pose.y};
  return std::any_of(arena.walls().begin(), arena.walls().end(),
                     [&](const Wall& w) { return distance_to_segment(p, w.a, w.b) <= radius; });
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

RawView render(const Arena& arena, const Pose& pose) {
  const Vec2 origin{pose.x, pose.y};
  if (!arena.contains(origin)) throw StateError("render: pose is outside the arena");

  const double half_fov = kFieldOfViewDeg * kPi / 360.0;
  const double tan_half = std::tan(half_fov);
  const double focal = 0.5 * kRawSize / tan_half;  // pixels
  const Vec2 forward{std::cos(pose.heading), std::sin(pose.heading)};
  const Vec2 leftward{-forward.y, forward.x};

  RawView view;
  for (int col = 0; col < kRawSize; ++col) {
    const double s = tan_half * ((2.0 * col + 1.0) / kRawSize - 1.0);
    const Vec2 dir{forward.x + s * leftward.x, forward.y + s * leftward.y};

    // Nearest wall along the ray; t is the perpendicular (image-plane) depth.
    double best_t = std::numeric_limits<double>::infinity();
    const Wall* hit = nullptr;
    double hit_u = 0.0;
    for (const Wall& w : arena.walls()) {
      const Vec2 edge = sub(w.b, w.a);
      const double denom = cross(dir, edge);
      if (std::abs(denom) < 1e-12) continue;
      const Vec2 rel = sub(w.a, origin);
      const double t = cross(rel, edge) / denom;
      const double frac = cross(rel, dir) / denom;
      if (t > 1e-9 && frac >= 0.0 && frac <= 1.0 && t < best_t) {
        best_t = t;
        hit = &w;
        hit_u = frac * std::hypot(edge.x, edge.y);
      }
    }

    const double range = hit ? best_t * std::hypot(dir.x, dir.y) : 0.0;
    const double shade = 1.0 / (1.0 + range);
    for (int row = 0; row < kRawSize; ++row) {
      std::uint8_t value;
      const double elevation = (0.5 * kRawSize - (row + 0.5)) / focal;
      const double height = hit ? kCameraHeight + best_t * elevation : (elevation > 0 ? 2.0 : -1.0);
      if (height > kWallHeight) {
        value = kCeilingGray;
      } else if (height < 0.0) {
        value = kFloorGray;
      } else {
        const double tex = texture_value(hit->texture, hit_u + hit->phase, height / kWallHeight);
        value = static_cast<std::uint8_t>(std::clamp(std::lround(tex * shade), 0L, 255L));
      }
      view.pixels[static_cast<std::size_t>(row * kRawSize + col)] = value;
    }
  }
  return view;
}

// ---------------------------------------------------------------------------
// Image pipeline
// ---------------------------------------------------------------------------

ProcessedView preprocess(const RawView& raw, BlurMode blur) {
  constexpr int n = kViewSize;
  std::array<std::uint8_t, n * n> small{};
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      int sum = 0;
      for (int dr = 0; dr < 3; ++dr) {
        for (int dc = 0; dc < 3; ++dc) sum += raw.at(3 * r + dr, 3 * c + dc);
      }
      small[static_cast<std::size_t>(r * n + c)] = static_cast<std::uint8_t>((sum + 4) / 9);
    }
  }

  ProcessedView out;
  if (blur == BlurMode::Sliding) {
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) {
        int sum = 0;
        for (int dr = -3; dr <= 3; ++dr) {
          const int rr = std::clamp(r + dr, 0, n - 1);
          for (int dc = -3; dc <= 3; ++dc) {
            const int cc = std::clamp(c + dc, 0, n - 1);
            sum += small[static_cast<std::size_t>(rr * n + cc)];
          }
        }
        out.full[static_cast<std::size_t>(r * n + c)] = static_cast<std::uint8_t>((sum + 24) / 49);
      }
    }
  } else {
    // Non-overlapping 7x7 tiles; the last tile in each direction is 5 wide.
    for (int r0 = 0; r0 < n; r0 += 7) {
      for (int c0 = 0; c0 < n; c0 += 7) {
        const int r1 = std::min(r0 + 7, n);
        const int c1 = std::min(c0 + 7, n);
        int sum = 0;
        for (int r = r0; r < r1; ++r) {
          for (int c = c0; c < c1; ++c) sum += small[static_cast<std::size_t>(r * n + c)];
        }
        const int count = (r1 - r0) * (c1 - c0);
        const auto mean = static_cast<std::uint8_t>((2 * sum + count) / (2 * count));
        for (int r = r0; r < r1; ++r) {
          for (int c = c0; c < c1; ++c) out.full[static_cast<std::size_t>(r * n + c)] = mean;
        }
      }
    }
  }

  auto crop = [&](int offset) {
    InputVector v;
    v.reserve(kCropPixels);
    for (int r = 0; r < n; ++r) {
      for (int c = offset; c < offset + kCropWidth; ++c) v.push_back(out.full[static_cast<std::size_t>(r * n + c)]);
    }
    return v;
  };
  out.left = crop(kCropOffsets[0]);
  out.middle = crop(kCropOffsets[1]);
  out.right = crop(kCropOffsets[2]);
  return out;
}

}  // namespace sparsenav
