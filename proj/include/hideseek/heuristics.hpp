#pragma once

#include <optional>
#include <vector>

#include "hideseek/config.hpp"
#include "hideseek/occupancy.hpp"
#include "hideseek/rng.hpp"
#include "hideseek/world.hpp"

namespace hs {

/// Per-seeker exploration target carried across decisions.
struct SeekerMemory {
  std::optional<int> frontier_cell;
  std::optional<Vec2> patrol_point;
};

/// Chase the nearest visible hider (ties go to the lower id); otherwise head
/// for the nearest unseen free cell, and once everything has been seen,
/// patrol random free cells drawn from `rng`.
Waypoint seeker_heuristic(const AgentState& self, const std::vector<const AgentState*>& visible_hiders,
                          const SeenGrid& seen, const OccupancyGrid& grid, Rng& rng,
                          SeekerMemory& memory, const HeuristicParams& params = {});

/// Additive pieces of the escape score; score = intercept - wall - obstacle.
struct EscapeTerms {
  double intercept = 0.0;  // seconds
  double wall = 0.0;       // lambda_wall / d_wall
  double obstacle = 0.0;   // lambda_obstacle / d_obstacle
  double score() const { return intercept - wall - obstacle; }
};

/// Time for a seeker at `seeker` (speed `vs`) to intercept a hider leaving
/// `hider` along unit `dir` at speed `vh`, using the closed form
/// constant-bearing solution. Intercepts later than `horizon` count as
/// `horizon`; directions that are never intercepted score
/// |hider + dir*vh*horizon - seeker| / vs, which always exceeds `horizon`.
double intercept_time(Vec2 hider, Vec2 dir, double vh, Vec2 seeker, double vs, double horizon);

/// Free distance along the ray from `origin` to the walls and to the nearest
/// obstacle, both grown by the agent radius (`margin` for the walls) and
/// capped at `cap`.
double wall_distance(Vec2 origin, Vec2 dir, double arena_side, double cap, double margin = 0.0);
double obstacle_distance(Vec2 origin, Vec2 dir, const OccupancyGrid& grid, double cap);

EscapeTerms escape_terms(Vec2 dir, const AgentState& hider,
                         const std::vector<const AgentState*>& visible_seekers,
                         const OccupancyGrid& grid, const WorldConfig& config,
                         const HeuristicParams& params = {});

inline double escape_score(Vec2 dir, const AgentState& hider,
                           const std::vector<const AgentState*>& visible_seekers,
                           const OccupancyGrid& grid, const WorldConfig& config,
                           const HeuristicParams& params = {}) {
  return escape_terms(dir, hider, visible_seekers, grid, config, params).score();
}

/// Index of the best of `params.escape_directions` evenly spaced directions
/// (direction k points at angle 2*pi*k/n); ties go to the smaller index.
int best_escape_direction(const AgentState& hider,
                          const std::vector<const AgentState*>& visible_seekers,
                          const OccupancyGrid& grid, const WorldConfig& config,
                          const HeuristicParams& params = {});

/// Holds position while no seeker is visible; otherwise moves up to
/// `escape_lookahead` meters along the best escape direction, stopping short
/// of walls and grown obstacles.
Waypoint hider_heuristic(const AgentState& self, const std::vector<const AgentState*>& visible_seekers,
                         const OccupancyGrid& grid, const WorldConfig& config,
                         const HeuristicParams& params = {});

/// Live agents of the opposite role visible from `self` within `range`.
std::vector<const AgentState*> visible_opponents(const WorldState& world, const AgentState& self,
                                                 double range);

}  // namespace hs
