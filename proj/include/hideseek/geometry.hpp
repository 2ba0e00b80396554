#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hs {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
  constexpr bool operator==(const Vec2&) const = default;
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
constexpr double norm_sq(Vec2 a) { return dot(a, a); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }
inline Vec2 unit_from_angle(double a) { return {std::cos(a), std::sin(a)}; }

/// Rotates `v` by `yaw` radians counter-clockwise.
inline Vec2 rotate(Vec2 v, double yaw) {
  const double c = std::cos(yaw), s = std::sin(yaw);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

double wrap_angle(double a);

/// Distance from `p` to the closed segment ab.
double point_segment_distance(Vec2 p, Vec2 a, Vec2 b);

struct OrientedBox {
  Vec2 center;
  double yaw = 0.0;
  Vec2 half;  // half extents along the local axes

  Vec2 to_local(Vec2 p) const { return rotate(p - center, -yaw); }
  std::array<Vec2, 4> corners() const;
};

struct Circle {
  Vec2 center;
  double radius = 0.0;
};

/// Parameter interval [t0, t1] (clipped to [0, 1]) over which the segment
/// p + t (q - p) lies inside the closed primitive. Empty optional if none.
std::optional<std::array<double, 2>> clip_segment(Vec2 p, Vec2 q, const OrientedBox& box);
std::optional<std::array<double, 2>> clip_segment(Vec2 p, Vec2 q, const Circle& circle);

enum class ShapeKind { Cross, Rectangle, LShape, Cylinder };

std::string_view to_string(ShapeKind kind);
ShapeKind shape_from_string(std::string_view name);

/// Static obstacle. `size_params` meaning depends on the shape:
///   Rectangle: {length, width}
///   Cross:     {length_a, length_b, thickness}  (two centered bars)
///   LShape:    {length_a, length_b, thickness}  (bars sharing one corner)
///   Cylinder:  {radius}
/// Non-circular shapes are stored as a union of oriented boxes.
class Obstacle {
 public:
  Obstacle(ShapeKind shape, Vec2 center, double yaw, std::vector<double> size_params);

  ShapeKind shape() const { return shape_; }
  Vec2 center() const { return center_; }
  double yaw() const { return yaw_; }
  const std::vector<double>& size_params() const { return size_params_; }

  const std::vector<OrientedBox>& boxes() const { return boxes_; }
  const std::optional<Circle>& circle() const { return circle_; }
  double bounding_radius() const { return bounding_radius_; }

  /// Closed containment of `p` in the obstacle grown by `inflate` meters.
  bool contains(Vec2 p, double inflate = 0.0) const;
  /// Euclidean distance from `p` to the obstacle region (0 inside).
  double distance_to(Vec2 p) const;
  /// Distance from the closed segment pq to the obstacle region.
  double segment_distance(Vec2 p, Vec2 q) const;
  /// True iff segment pq comes within `inflate` meters of the region.
  bool segment_hits(Vec2 p, Vec2 q, double inflate = 0.0) const;
  /// True iff the open segment (endpoints excluded) meets the closed region.
  bool open_segment_hits(Vec2 p, Vec2 q) const;
  /// Distance along the unit ray `dir` from `origin` to the grown region,
  /// or nullopt when the ray misses within `max_dist`.
  std::optional<double> ray_hit(Vec2 origin, Vec2 dir, double max_dist, double inflate = 0.0) const;
  /// Minimum distance between the two regions (0 when they overlap).
  double distance_to(const Obstacle& other) const;

  bool operator==(const Obstacle& o) const {
    return shape_ == o.shape_ && center_ == o.center_ && yaw_ == o.yaw_ &&
           size_params_ == o.size_params_;
  }

 private:
  ShapeKind shape_;
  Vec2 center_;
  double yaw_;
  std::vector<double> size_params_;
  std::vector<OrientedBox> boxes_;
  std::optional<Circle> circle_;
  double bounding_radius_ = 0.0;
};

/// True iff the closed segment pq intersects the obstacle's closed region.
inline bool segment_intersects_obstacle(Vec2 p, Vec2 q, const Obstacle& obstacle) {
  return obstacle.segment_hits(p, q, 0.0);
}

/// Line-of-sight visibility with a range limit (360 degree sensing).
bool visible(Vec2 from, Vec2 target, const std::vector<Obstacle>& obstacles, double range);

}  // namespace hs
