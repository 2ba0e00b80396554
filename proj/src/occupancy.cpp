#include "hideseek/occupancy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hs {

OccupancyGrid::OccupancyGrid(double arena_side, double resolution, std::vector<Obstacle> obstacles,
                             double inflation)
    : arena_side_(arena_side),
      resolution_(resolution),
      inflation_(inflation),
      width_(static_cast<int>(std::ceil(arena_side / resolution - 1e-9))),
      height_(width_),
      obstacles_(std::move(obstacles)) {
  blocked_.assign(size(), 0);
  edges_.assign(size(), 0);
  for (int i = 0; i < size(); ++i) {
    const Vec2 c = center(i);
    if (!inside_walls(c)) {
      blocked_[i] = 1;
      continue;
    }
    for (const auto& o : obstacles_) {
      if (o.contains(c, inflation_)) {
        blocked_[i] = 1;
        break;
      }
    }
  }
  // Undirected edges are evaluated once (directions 0, 1, 4, 5) and mirrored.
  for (int i = 0; i < size(); ++i) {
    if (blocked_[i]) continue;
    for (int dir : {0, 1, 4, 5}) {
      const int j = neighbor(i, dir);
      if (j < 0 || blocked_[j]) continue;
      const Vec2 a = center(i), b = center(j);
      bool ok = true;
      for (const auto& o : obstacles_) {
        if (o.segment_hits(a, b, inflation_)) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      edges_[i] |= static_cast<std::uint8_t>(1u << dir);
      edges_[j] |= static_cast<std::uint8_t>(1u << ((dir < 4) ? (dir + 2) % 4 : 4 + (dir - 2) % 4));
    }
  }
}

int OccupancyGrid::cell_at(Vec2 p) const {
  const int col = std::clamp(static_cast<int>(std::floor(p.x / resolution_)), 0, width_ - 1);
  const int row = std::clamp(static_cast<int>(std::floor(p.y / resolution_)), 0, height_ - 1);
  return index(col, row);
}

int OccupancyGrid::neighbor(int idx, int dir) const {
  const int col = col_of(idx) + kDirections[dir][0];
  const int row = row_of(idx) + kDirections[dir][1];
  if (col < 0 || row < 0 || col >= width_ || row >= height_) return -1;
  return index(col, row);
}

bool OccupancyGrid::point_free(Vec2 p) const {
  if (!inside_walls(p)) return false;
  for (const auto& o : obstacles_)
    if (o.contains(p, inflation_)) return false;
  return true;
}

bool OccupancyGrid::segment_free(Vec2 a, Vec2 b) const {
  if (!inside_walls(a) || !inside_walls(b)) return false;
  for (const auto& o : obstacles_)
    if (o.segment_hits(a, b, inflation_)) return false;
  return true;
}

int OccupancyGrid::free_count() const {
  return static_cast<int>(std::count(blocked_.begin(), blocked_.end(), 0));
}

std::vector<int> OccupancyGrid::components() const {
  std::vector<int> label(size(), -1);
  std::vector<int> stack;
  int next = 0;
  for (int s = 0; s < size(); ++s) {
    if (blocked_[s] || label[s] >= 0) continue;
    label[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      const int i = stack.back();
      stack.pop_back();
      for (int dir = 0; dir < 8; ++dir) {
        if (!edge_ok(i, dir)) continue;
        const int j = neighbor(i, dir);
        if (label[j] < 0) {
          label[j] = next;
          stack.push_back(j);
        }
      }
    }
    ++next;
  }
  return label;
}

bool OccupancyGrid::free_space_connected() const {
  const auto label = components();
  return std::all_of(label.begin(), label.end(), [](int l) { return l <= 0; });
}

int SeenGrid::count() const { return static_cast<int>(std::count(seen_.begin(), seen_.end(), 1)); }

bool cell_visible(Vec2 from, Vec2 cell_center, const std::vector<Obstacle>& obstacles,
                  double range) {
  if (distance(from, cell_center) > range) return false;
  for (const auto& o : obstacles) {
    if (o.contains(cell_center)) continue;
    if (o.open_segment_hits(from, cell_center)) return false;
  }
  return true;
}

void update_seen(SeenGrid& seen, Vec2 position, const std::vector<Obstacle>& obstacles,
                 double range) {
  std::vector<const Obstacle*> nearby;
  for (const auto& o : obstacles)
    if (distance(o.center(), position) <= range + o.bounding_radius()) nearby.push_back(&o);

  const double res = seen.resolution();
  const int c0 = std::max(0, static_cast<int>(std::floor((position.x - range) / res)));
  const int c1 = std::min(seen.width() - 1, static_cast<int>(std::floor((position.x + range) / res)));
  const int r0 = std::max(0, static_cast<int>(std::floor((position.y - range) / res)));
  const int r1 = std::min(seen.height() - 1, static_cast<int>(std::floor((position.y + range) / res)));
  for (int row = r0; row <= r1; ++row) {
    for (int col = c0; col <= c1; ++col) {
      const int idx = row * seen.width() + col;
      if (seen.seen(idx)) continue;
      const Vec2 c{(col + 0.5) * res, (row + 0.5) * res};
      if (distance(position, c) > range) continue;
      bool occluded = false;
      for (const Obstacle* o : nearby) {
        if (o->contains(c)) continue;
        if (o->open_segment_hits(position, c)) {
          occluded = true;
          break;
        }
      }
      if (!occluded) seen.mark(idx);
    }
  }
}

}  // namespace hs
