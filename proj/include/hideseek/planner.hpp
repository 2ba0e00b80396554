#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "hideseek/occupancy.hpp"

namespace hs {

/// Raised when the goal's free cell lies in a different component than the
/// start; carries the reachable cell closest to the goal.
class UnreachableGoal : public std::runtime_error {
 public:
  UnreachableGoal(int nearest_cell, Vec2 nearest_point)
      : std::runtime_error("goal unreachable"), nearest_cell(nearest_cell),
        nearest_reachable(nearest_point) {}
  int nearest_cell;
  Vec2 nearest_reachable;
};

struct GridPath {
  std::vector<int> cells;  // start cell first
  int straight_moves = 0;
  int diagonal_moves = 0;
  double cost() const { return straight_moves + diagonal_moves * 1.4142135623730951; }
};

/// 8-connected A* over allowed moves with a Euclidean heuristic; open-list
/// ties are broken by the lower cell index. Empty optional if unreachable.
std::optional<GridPath> astar(const OccupancyGrid& grid, int start_cell, int goal_cell);

struct PlannedPath {
  std::vector<Vec2> waypoints;  // excludes the start point
  bool goal_adjusted = false;   // goal was not free; path ends at the nearest free cell
};

/// Plans from `start` (free space) to `goal`: grid A* to the free cell nearest
/// the goal, then greedy line-of-sight shortcutting. Every returned segment
/// clears the grown obstacles. `anchor`, when given, is a point known to be
/// reachable from `start` by a straight free segment; it is used to attach to
/// the grid when no nearby cell center is directly reachable.
PlannedPath plan_path(Vec2 start, Vec2 goal, const OccupancyGrid& grid,
                      std::optional<Vec2> anchor = std::nullopt);

}  // namespace hs
