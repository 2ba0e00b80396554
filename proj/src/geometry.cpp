#include "hideseek/geometry.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace hs {

double wrap_angle(double a) {
  a = std::fmod(a + std::numbers::pi, 2.0 * std::numbers::pi);
  if (a < 0) a += 2.0 * std::numbers::pi;
  return a - std::numbers::pi;
}

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len_sq = norm_sq(ab);
  if (len_sq == 0.0) return distance(p, a);
  const double t = std::clamp(dot(p - a, ab) / len_sq, 0.0, 1.0);
  return distance(p, a + ab * t);
}

std::array<Vec2, 4> OrientedBox::corners() const {
  return {center + rotate({half.x, half.y}, yaw), center + rotate({-half.x, half.y}, yaw),
          center + rotate({-half.x, -half.y}, yaw), center + rotate({half.x, -half.y}, yaw)};
}

namespace {

using Interval = std::optional<std::array<double, 2>>;

Interval clip_aabb(Vec2 p, Vec2 d, Vec2 half) {
  double lo = 0.0, hi = 1.0;
  const double pc[2] = {p.x, p.y};
  const double dc[2] = {d.x, d.y};
  const double hc[2] = {half.x, half.y};
  for (int i = 0; i < 2; ++i) {
    if (dc[i] == 0.0) {
      if (pc[i] < -hc[i] || pc[i] > hc[i]) return std::nullopt;
      continue;
    }
    double t1 = (-hc[i] - pc[i]) / dc[i];
    double t2 = (hc[i] - pc[i]) / dc[i];
    if (t1 > t2) std::swap(t1, t2);
    lo = std::max(lo, t1);
    hi = std::min(hi, t2);
    if (lo > hi) return std::nullopt;
  }
  return std::array<double, 2>{lo, hi};
}

double box_point_distance(const OrientedBox& box, Vec2 p) {
  const Vec2 l = box.to_local(p);
  const double qx = std::abs(l.x) - box.half.x;
  const double qy = std::abs(l.y) - box.half.y;
  return std::hypot(std::max(qx, 0.0), std::max(qy, 0.0));
}

// Visits the primitives making up the Minkowski sum of a box with a disk.
template <typename F>
bool any_rounded(const OrientedBox& box, double r, F&& f) {
  if (r <= 0.0) return f(box);
  if (f(OrientedBox{box.center, box.yaw, {box.half.x + r, box.half.y}})) return true;
  if (f(OrientedBox{box.center, box.yaw, {box.half.x, box.half.y + r}})) return true;
  for (const Vec2 c : box.corners())
    if (f(Circle{c, r})) return true;
  return false;
}

bool interval_open_hit(const Interval& iv) {
  if (!iv) return false;
  const auto [a, b] = *iv;
  if (a < b) return true;
  return a > 0.0 && a < 1.0;
}

}  // namespace

Interval clip_segment(Vec2 p, Vec2 q, const OrientedBox& box) {
  return clip_aabb(box.to_local(p), rotate(q - p, -box.yaw), box.half);
}

Interval clip_segment(Vec2 p, Vec2 q, const Circle& circle) {
  const Vec2 d = q - p;
  const Vec2 f = p - circle.center;
  const double a = norm_sq(d);
  const double c = norm_sq(f) - circle.radius * circle.radius;
  if (a == 0.0) {
    if (c <= 0.0) return std::array<double, 2>{0.0, 1.0};
    return std::nullopt;
  }
  const double b = 2.0 * dot(f, d);
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return std::nullopt;
  const double s = std::sqrt(disc);
  const double t0 = std::max((-b - s) / (2.0 * a), 0.0);
  const double t1 = std::min((-b + s) / (2.0 * a), 1.0);
  if (t0 > t1) return std::nullopt;
  return std::array<double, 2>{t0, t1};
}

std::string_view to_string(ShapeKind kind) {
  switch (kind) {
    case ShapeKind::Cross: return "cross";
    case ShapeKind::Rectangle: return "rectangle";
    case ShapeKind::LShape: return "lshape";
    case ShapeKind::Cylinder: return "cylinder";
  }
  return "unknown";
}

ShapeKind shape_from_string(std::string_view name) {
  if (name == "cross") return ShapeKind::Cross;
  if (name == "rectangle") return ShapeKind::Rectangle;
  if (name == "lshape") return ShapeKind::LShape;
  if (name == "cylinder") return ShapeKind::Cylinder;
  throw std::invalid_argument("unknown obstacle shape '" + std::string(name) + "'");
}

Obstacle::Obstacle(ShapeKind shape, Vec2 center, double yaw, std::vector<double> size_params)
    : shape_(shape), center_(center), yaw_(yaw), size_params_(std::move(size_params)) {
  const auto need = [&](std::size_t n) {
    if (size_params_.size() != n)
      throw std::invalid_argument(std::string(to_string(shape_)) + " expects " +
                                  std::to_string(n) + " size parameters");
    for (double v : size_params_)
      if (!(v > 0.0)) throw std::invalid_argument("obstacle sizes must be positive");
  };
  const auto place = [&](Vec2 local_center, Vec2 half) {
    boxes_.push_back({center_ + rotate(local_center, yaw_), yaw_, half});
  };
  switch (shape_) {
    case ShapeKind::Rectangle:
      need(2);
      place({0, 0}, {size_params_[0] / 2, size_params_[1] / 2});
      break;
    case ShapeKind::Cross: {
      need(3);
      const double la = size_params_[0], lb = size_params_[1], t = size_params_[2];
      place({0, 0}, {la / 2, t / 2});
      place({0, 0}, {t / 2, lb / 2});
      break;
    }
    case ShapeKind::LShape: {
      need(3);
      const double la = size_params_[0], lb = size_params_[1], t = size_params_[2];
      place({0, -lb / 2 + t / 2}, {la / 2, t / 2});
      place({-la / 2 + t / 2, 0}, {t / 2, lb / 2});
      break;
    }
    case ShapeKind::Cylinder:
      need(1);
      circle_ = Circle{center_, size_params_[0]};
      break;
  }
  bounding_radius_ = circle_ ? circle_->radius : 0.0;
  for (const auto& b : boxes_)
    bounding_radius_ = std::max(bounding_radius_, distance(b.center, center_) + norm(b.half));
}

double Obstacle::distance_to(Vec2 p) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& b : boxes_) best = std::min(best, box_point_distance(b, p));
  if (circle_) best = std::min(best, std::max(0.0, distance(p, circle_->center) - circle_->radius));
  return best;
}

bool Obstacle::contains(Vec2 p, double inflate) const {
  if (distance(p, center_) > bounding_radius_ + inflate) return false;
  return distance_to(p) <= inflate;
}

double Obstacle::segment_distance(Vec2 p, Vec2 q) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& b : boxes_) {
    if (clip_segment(p, q, b)) return 0.0;
    best = std::min({best, box_point_distance(b, p), box_point_distance(b, q)});
    for (const Vec2 c : b.corners()) best = std::min(best, point_segment_distance(c, p, q));
  }
  if (circle_) {
    best = std::min(best, std::max(0.0, point_segment_distance(circle_->center, p, q) -
                                            circle_->radius));
  }
  return best;
}

bool Obstacle::segment_hits(Vec2 p, Vec2 q, double inflate) const {
  if (point_segment_distance(center_, p, q) > bounding_radius_ + inflate) return false;
  if (circle_ && clip_segment(p, q, Circle{circle_->center, circle_->radius + inflate}))
    return true;
  const auto hit = [&](const auto& prim) { return clip_segment(p, q, prim).has_value(); };
  for (const auto& b : boxes_)
    if (any_rounded(b, inflate, hit)) return true;
  return false;
}

bool Obstacle::open_segment_hits(Vec2 p, Vec2 q) const {
  if (point_segment_distance(center_, p, q) > bounding_radius_) return false;
  for (const auto& b : boxes_)
    if (interval_open_hit(clip_segment(p, q, b))) return true;
  if (circle_ && interval_open_hit(clip_segment(p, q, *circle_))) return true;
  return false;
}

std::optional<double> Obstacle::ray_hit(Vec2 origin, Vec2 dir, double max_dist,
                                        double inflate) const {
  const Vec2 end = origin + dir * max_dist;
  if (point_segment_distance(center_, origin, end) > bounding_radius_ + inflate)
    return std::nullopt;
  double best = std::numeric_limits<double>::infinity();
  const auto first = [&](const auto& prim) {
    if (auto iv = clip_segment(origin, end, prim)) best = std::min(best, (*iv)[0]);
    return false;
  };
  for (const auto& b : boxes_) any_rounded(b, inflate, first);
  if (circle_) first(Circle{circle_->center, circle_->radius + inflate});
  if (!std::isfinite(best)) return std::nullopt;
  return best * max_dist;
}

double Obstacle::distance_to(const Obstacle& other) const {
  double best = std::numeric_limits<double>::infinity();
  const auto box_box = [](const OrientedBox& a, const OrientedBox& b) {
    const auto ca = a.corners();
    const auto cb = b.corners();
    for (int i = 0; i < 4; ++i) {
      if (clip_segment(ca[i], ca[(i + 1) % 4], b)) return 0.0;
      if (clip_segment(cb[i], cb[(i + 1) % 4], a)) return 0.0;
    }
    double d = std::numeric_limits<double>::infinity();
    for (const Vec2 c : ca) d = std::min(d, box_point_distance(b, c));
    for (const Vec2 c : cb) d = std::min(d, box_point_distance(a, c));
    return d;
  };
  for (const auto& a : boxes_) {
    for (const auto& b : other.boxes_) best = std::min(best, box_box(a, b));
    if (other.circle_)
      best = std::min(best, std::max(0.0, box_point_distance(a, other.circle_->center) -
                                              other.circle_->radius));
  }
  if (circle_) {
    for (const auto& b : other.boxes_)
      best = std::min(best,
                      std::max(0.0, box_point_distance(b, circle_->center) - circle_->radius));
    if (other.circle_)
      best = std::min(best, std::max(0.0, distance(circle_->center, other.circle_->center) -
                                              circle_->radius - other.circle_->radius));
  }
  return best;
}

bool visible(Vec2 from, Vec2 target, const std::vector<Obstacle>& obstacles, double range) {
  if (distance(from, target) > range) return false;
  for (const auto& o : obstacles)
    if (o.open_segment_hits(from, target)) return false;
  return true;
}

}  // namespace hs
