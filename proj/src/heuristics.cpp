#include "hideseek/heuristics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace hs {

namespace {

int nearest_unseen_free(const SeenGrid& seen, const OccupancyGrid& grid, Vec2 p) {
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid.size(); ++i) {
    if (grid.blocked(i) || seen.seen(i)) continue;
    const double d = norm_sq(grid.center(i) - p);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

Vec2 random_free_point(const OccupancyGrid& grid, Rng& rng) {
  for (;;) {
    const int i = static_cast<int>(rng.index(static_cast<std::size_t>(grid.size())));
    if (!grid.blocked(i)) return grid.center(i);
  }
}

}  // namespace

Waypoint seeker_heuristic(const AgentState& self, const std::vector<const AgentState*>& visible_hiders,
                          const SeenGrid& seen, const OccupancyGrid& grid, Rng& rng,
                          SeekerMemory& memory, const HeuristicParams& params) {
  const AgentState* target = nullptr;
  double best = std::numeric_limits<double>::infinity();
  for (const AgentState* h : visible_hiders) {
    const double d = distance(self.position, h->position);
    if (d < best || (d == best && target && h->id < target->id)) {
      best = d;
      target = h;
    }
  }
  if (target) {
    memory.frontier_cell.reset();
    memory.patrol_point.reset();
    return {target->position, std::nullopt};
  }

  if (memory.frontier_cell && seen.seen(*memory.frontier_cell)) memory.frontier_cell.reset();
  if (!memory.frontier_cell) {
    const int cell = nearest_unseen_free(seen, grid, self.position);
    if (cell >= 0) memory.frontier_cell = cell;
  }
  if (memory.frontier_cell) return {grid.center(*memory.frontier_cell), std::nullopt};

  if (memory.patrol_point && distance(self.position, *memory.patrol_point) <= params.waypoint_reached)
    memory.patrol_point.reset();
  if (!memory.patrol_point) memory.patrol_point = random_free_point(grid, rng);
  return {*memory.patrol_point, std::nullopt};
}

double intercept_time(Vec2 hider, Vec2 dir, double vh, Vec2 seeker, double vs, double horizon) {
  // |r + vh*u*t| = vs*t  =>  (vh^2 - vs^2) t^2 + 2 vh (r.u) t + |r|^2 = 0
  const Vec2 r = hider - seeker;
  const double a = vh * vh - vs * vs;
  const double b = 2.0 * vh * dot(r, dir);
  const double c = norm_sq(r);
  std::optional<double> t;
  if (c == 0.0) {
    t = 0.0;
  } else if (std::abs(a) < 1e-12) {
    if (b < 0.0) t = -c / b;
  } else {
    const double disc = b * b - 4.0 * a * c;
    if (disc >= 0.0) {
      const double s = std::sqrt(disc);
      const double t1 = (-b - s) / (2.0 * a), t2 = (-b + s) / (2.0 * a);
      const double lo = std::min(t1, t2), hi = std::max(t1, t2);
      if (lo > 0.0) t = lo;
      else if (hi > 0.0) t = hi;
    }
  }
  if (t) return std::min(*t, horizon);
  return norm(r + dir * (vh * horizon)) / vs;
}

double wall_distance(Vec2 origin, Vec2 dir, double arena_side, double cap, double margin) {
  const double lo = margin, hi = arena_side - margin;
  double d = cap;
  if (dir.x > 0.0) d = std::min(d, (hi - origin.x) / dir.x);
  if (dir.x < 0.0) d = std::min(d, (lo - origin.x) / dir.x);
  if (dir.y > 0.0) d = std::min(d, (hi - origin.y) / dir.y);
  if (dir.y < 0.0) d = std::min(d, (lo - origin.y) / dir.y);
  return std::max(d, 0.0);
}

double obstacle_distance(Vec2 origin, Vec2 dir, const OccupancyGrid& grid, double cap) {
  double d = cap;
  for (const Obstacle& o : grid.obstacles()) {
    if (distance(o.center(), origin) > cap + o.bounding_radius() + grid.inflation()) continue;
    if (auto hit = o.ray_hit(origin, dir, d, grid.inflation())) d = std::min(d, *hit);
  }
  return d;
}

EscapeTerms escape_terms(Vec2 dir, const AgentState& hider,
                         const std::vector<const AgentState*>& visible_seekers,
                         const OccupancyGrid& grid, const WorldConfig& config,
                         const HeuristicParams& params) {
  EscapeTerms t;
  t.intercept = std::numeric_limits<double>::infinity();
  for (const AgentState* s : visible_seekers)
    t.intercept = std::min(t.intercept, intercept_time(hider.position, dir, hider.speed, s->position,
                                                       s->speed, params.escape_horizon));
  const double cap = config.hider_range;
  const double dw = std::max(wall_distance(hider.position, dir, config.arena_side, cap, grid.inflation()),
                             params.min_clearance);
  const double dob = std::max(obstacle_distance(hider.position, dir, grid, cap),
                              params.min_clearance);
  t.wall = params.lambda_wall / dw;
  t.obstacle = params.lambda_obstacle / dob;
  return t;
}

int best_escape_direction(const AgentState& hider,
                          const std::vector<const AgentState*>& visible_seekers,
                          const OccupancyGrid& grid, const WorldConfig& config,
                          const HeuristicParams& params) {
  const int n = params.escape_directions;
  int best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < n; ++k) {
    const Vec2 dir = unit_from_angle(2.0 * std::numbers::pi * k / n);
    const double s = escape_score(dir, hider, visible_seekers, grid, config, params);
    if (s > best_score) {
      best_score = s;
      best = k;
    }
  }
  return best;
}

Waypoint hider_heuristic(const AgentState& self, const std::vector<const AgentState*>& visible_seekers,
                         const OccupancyGrid& grid, const WorldConfig& config,
                         const HeuristicParams& params) {
  if (visible_seekers.empty()) return {self.position, std::nullopt};
  const int k = best_escape_direction(self, visible_seekers, grid, config, params);
  const double angle = 2.0 * std::numbers::pi * k / params.escape_directions;
  const Vec2 dir = unit_from_angle(angle);
  const double lookahead = params.escape_lookahead;
  const double free = std::min(wall_distance(self.position, dir, config.arena_side, lookahead, grid.inflation()),
                               obstacle_distance(self.position, dir, grid, lookahead));
  const double reach = free >= lookahead ? lookahead : free - 0.05;
  Vec2 target = self.position + dir * std::max(reach, 0.0);
  if (reach < grid.resolution()) {
    target = self.position + dir * lookahead;
    const double lo = grid.inflation(), hi = config.arena_side - grid.inflation();
    target.x = std::clamp(target.x, lo, hi);
    target.y = std::clamp(target.y, lo, hi);
  }
  return {target, std::nullopt};
}

std::vector<const AgentState*> visible_opponents(const WorldState& world, const AgentState& self,
                                                 double range) {
  std::vector<const AgentState*> out;
  for (const AgentState& a : world.agents) {
    if (!a.alive || a.role == self.role) continue;
    if (visible(self.position, a.position, world.obstacles, range)) out.push_back(&a);
  }
  return out;
}

}  // namespace hs
