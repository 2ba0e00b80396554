#include "hideseek/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace hs {

namespace {

struct OpenEntry {
  double f;
  int cell;
  bool operator>(const OpenEntry& o) const { return f != o.f ? f > o.f : cell > o.cell; }
};

// Free cells within `radius` cells of `p`, nearest first, whose centers are
// reachable from `p` by a straight free segment.
int attach_cell(const OccupancyGrid& grid, Vec2 p, int radius) {
  const int base = grid.cell_at(p);
  const int bc = grid.col_of(base), br = grid.row_of(base);
  std::vector<std::pair<double, int>> candidates;
  for (int dr = -radius; dr <= radius; ++dr) {
    for (int dc = -radius; dc <= radius; ++dc) {
      const int c = bc + dc, r = br + dr;
      if (c < 0 || r < 0 || c >= grid.width() || r >= grid.height()) continue;
      const int idx = grid.index(c, r);
      if (grid.blocked(idx)) continue;
      candidates.emplace_back(distance(p, grid.center(idx)), idx);
    }
  }
  std::sort(candidates.begin(), candidates.end());
  for (const auto& [d, idx] : candidates)
    if (grid.segment_free(p, grid.center(idx))) return idx;
  return -1;
}

int nearest_free_cell(const OccupancyGrid& grid, Vec2 p, const std::vector<int>* labels = nullptr,
                      int label = -1) {
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid.size(); ++i) {
    if (grid.blocked(i)) continue;
    if (labels && (*labels)[i] != label) continue;
    const double d = distance(p, grid.center(i));
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

}  // namespace

std::optional<GridPath> astar(const OccupancyGrid& grid, int start_cell, int goal_cell) {
  if (grid.blocked(start_cell) || grid.blocked(goal_cell)) return std::nullopt;
  const int n = grid.size();
  thread_local std::vector<double> g;
  thread_local std::vector<int> parent;
  thread_local std::vector<std::uint8_t> closed;
  g.assign(n, std::numeric_limits<double>::infinity());
  parent.assign(n, -1);
  closed.assign(n, 0);

  const int gc = grid.col_of(goal_cell), gr = grid.row_of(goal_cell);
  const auto h = [&](int idx) {
    return std::hypot(static_cast<double>(grid.col_of(idx) - gc),
                      static_cast<double>(grid.row_of(idx) - gr));
  };
  std::priority_queue<OpenEntry, std::vector<OpenEntry>, std::greater<>> open;
  g[start_cell] = 0.0;
  open.push({h(start_cell), start_cell});
  while (!open.empty()) {
    const OpenEntry top = open.top();
    open.pop();
    if (closed[top.cell]) continue;
    closed[top.cell] = 1;
    if (top.cell == goal_cell) break;
    for (int dir = 0; dir < 8; ++dir) {
      if (!grid.edge_ok(top.cell, dir)) continue;
      const int next = grid.neighbor(top.cell, dir);
      if (closed[next]) continue;
      const double cand = g[top.cell] + OccupancyGrid::step_cost(dir);
      if (cand < g[next]) {
        g[next] = cand;
        parent[next] = top.cell;
        open.push({cand + h(next), next});
      }
    }
  }
  if (!closed[goal_cell]) return std::nullopt;

  GridPath path;
  for (int c = goal_cell; c != -1; c = parent[c]) path.cells.push_back(c);
  std::reverse(path.cells.begin(), path.cells.end());
  for (std::size_t i = 1; i < path.cells.size(); ++i) {
    const int a = path.cells[i - 1], b = path.cells[i];
    const bool diagonal = grid.col_of(a) != grid.col_of(b) && grid.row_of(a) != grid.row_of(b);
    (diagonal ? path.diagonal_moves : path.straight_moves) += 1;
  }
  return path;
}

PlannedPath plan_path(Vec2 start, Vec2 goal, const OccupancyGrid& grid, std::optional<Vec2> anchor) {
  const bool goal_free = grid.point_free(goal);
  if (goal_free && grid.segment_free(start, goal)) return {{goal}, false};

  // Attach the continuous start to the grid.
  std::vector<Vec2> head{start};
  int start_cell = attach_cell(grid, start, 2);
  if (start_cell < 0 && anchor && grid.segment_free(start, *anchor)) {
    head.push_back(*anchor);
    start_cell = attach_cell(grid, *anchor, 2);
  }
  if (start_cell < 0) start_cell = attach_cell(grid, head.back(), 6);
  if (start_cell < 0) throw UnreachableGoal(grid.cell_at(start), start);

  // Attach the goal, or fall back to the free cell nearest to it.
  bool adjusted = !goal_free;
  int goal_cell = goal_free ? attach_cell(grid, goal, 2) : -1;
  if (goal_cell < 0) {
    adjusted = true;
    goal_cell = nearest_free_cell(grid, goal);
  }

  auto grid_path = astar(grid, start_cell, goal_cell);
  if (!grid_path) {
    const auto labels = grid.components();
    const int nearest = nearest_free_cell(grid, goal, &labels, labels[start_cell]);
    throw UnreachableGoal(nearest, grid.center(nearest));
  }

  std::vector<Vec2> points = head;
  for (int c : grid_path->cells) points.push_back(grid.center(c));
  if (!adjusted) points.push_back(goal);

  PlannedPath out;
  out.goal_adjusted = adjusted;
  std::size_t i = 0;
  while (i + 1 < points.size()) {
    std::size_t j = points.size() - 1;
    while (j > i + 1 && !grid.segment_free(points[i], points[j])) --j;
    out.waypoints.push_back(points[j]);
    i = j;
  }
  if (out.waypoints.empty()) out.waypoints.push_back(points.back());
  return out;
}

}  // namespace hs
