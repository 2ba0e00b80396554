#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "hideseek/geometry.hpp"

namespace hs {

/// Blocked/free discretization of the arena. Cell (col, row) covers
/// [col*res, (col+1)*res) x [row*res, (row+1)*res); index = row*width + col.
/// A cell is blocked iff its center lies inside an obstacle grown by the
/// agent radius or closer than that radius to a wall. Moves between 8-connected neighbours are only allowed when
/// the straight segment between the two centers clears every grown obstacle,
/// so any path over allowed moves is collision free.
class OccupancyGrid {
 public:
  static constexpr std::array<std::array<int, 2>, 8> kDirections{
      {{1, 0}, {0, 1}, {-1, 0}, {0, -1}, {1, 1}, {-1, 1}, {-1, -1}, {1, -1}}};

  OccupancyGrid(double arena_side, double resolution, std::vector<Obstacle> obstacles,
                double inflation);

  int width() const { return width_; }
  int height() const { return height_; }
  int size() const { return width_ * height_; }
  double resolution() const { return resolution_; }
  double arena_side() const { return arena_side_; }
  double inflation() const { return inflation_; }
  const std::vector<Obstacle>& obstacles() const { return obstacles_; }

  int index(int col, int row) const { return row * width_ + col; }
  int col_of(int idx) const { return idx % width_; }
  int row_of(int idx) const { return idx / width_; }
  Vec2 center(int idx) const {
    return {(col_of(idx) + 0.5) * resolution_, (row_of(idx) + 0.5) * resolution_};
  }
  /// Cell containing `p`, clamped onto the grid.
  int cell_at(Vec2 p) const;

  bool blocked(int idx) const { return blocked_[idx] != 0; }
  /// Neighbour in direction `dir` (0..7), or -1 when off-grid.
  int neighbor(int idx, int dir) const;
  bool edge_ok(int idx, int dir) const { return (edges_[idx] >> dir) & 1u; }
  static double step_cost(int dir) { return dir < 4 ? 1.0 : 1.4142135623730951; }

  bool in_arena(Vec2 p) const {
    return p.x >= 0.0 && p.y >= 0.0 && p.x <= arena_side_ && p.y <= arena_side_;
  }
  /// At least `inflation` away from every wall.
  bool inside_walls(Vec2 p) const {
    return p.x >= inflation_ && p.y >= inflation_ && p.x <= arena_side_ - inflation_ &&
           p.y <= arena_side_ - inflation_;
  }
  /// Inside the grown walls and outside every grown obstacle.
  bool point_free(Vec2 p) const;
  /// Closed segment stays inside the grown walls and clears every grown obstacle.
  bool segment_free(Vec2 a, Vec2 b) const;

  int free_count() const;
  /// Labels 8-connected components of free cells over allowed moves;
  /// blocked cells get -1.
  std::vector<int> components() const;
  bool free_space_connected() const;

 private:
  double arena_side_;
  double resolution_;
  double inflation_;
  int width_;
  int height_;
  std::vector<Obstacle> obstacles_;
  std::vector<std::uint8_t> blocked_;
  std::vector<std::uint8_t> edges_;
};

/// Accumulated per-seeker visibility memory over the occupancy geometry.
/// Monotone: cells only ever flip from unseen to seen.
class SeenGrid {
 public:
  SeenGrid() = default;
  SeenGrid(int width, int height, double resolution)
      : width_(width), height_(height), resolution_(resolution),
        seen_(static_cast<std::size_t>(width) * height, 0) {}
  explicit SeenGrid(const OccupancyGrid& grid)
      : SeenGrid(grid.width(), grid.height(), grid.resolution()) {}

  int width() const { return width_; }
  int height() const { return height_; }
  int size() const { return width_ * height_; }
  double resolution() const { return resolution_; }
  Vec2 center(int idx) const {
    return {(idx % width_ + 0.5) * resolution_, (idx / width_ + 0.5) * resolution_};
  }
  bool seen(int idx) const { return seen_[idx] != 0; }
  void mark(int idx) { seen_[idx] = 1; }
  int count() const;
  const std::vector<std::uint8_t>& data() const { return seen_; }

  bool operator==(const SeenGrid&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  double resolution_ = 0.5;
  std::vector<std::uint8_t> seen_;
};

/// Visibility test applied per cell center: like `visible()`, except that an
/// obstacle containing the target point does not occlude it. This lets the
/// faces of obstacles be remembered as seen.
bool cell_visible(Vec2 from, Vec2 cell_center, const std::vector<Obstacle>& obstacles,
                  double range);

/// Marks every cell whose center is visible from `position` within `range`.
/// Already seen cells are left untouched, so repeated calls are idempotent.
void update_seen(SeenGrid& seen, Vec2 position, const std::vector<Obstacle>& obstacles,
                 double range);

}  // namespace hs
