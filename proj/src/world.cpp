#include "hideseek/world.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "hideseek/planner.hpp"

namespace hs {

namespace {

constexpr int kMaxAttempts = 100;
constexpr int kPlacementTries = 200;

Obstacle sample_obstacle(Rng& rng, ShapeKind kind, Vec2 center) {
  const double yaw = rng.uniform(0.0, 2.0 * std::numbers::pi);
  switch (kind) {
    case ShapeKind::Rectangle:
      return {kind, center, yaw, {rng.uniform(4.0, 8.0), rng.uniform(1.5, 4.0)}};
    case ShapeKind::Cross:
    case ShapeKind::LShape:
      return {kind, center, yaw,
              {rng.uniform(4.0, 8.0), rng.uniform(4.0, 8.0), rng.uniform(1.0, 2.0)}};
    case ShapeKind::Cylinder:
      return {kind, center, yaw, {rng.uniform(1.5, 3.0)}};
  }
  throw std::logic_error("unhandled shape");
}

bool inside_with_clearance(const Obstacle& o, double side, double clearance) {
  const auto ok = [&](Vec2 p, double r) {
    return p.x - r >= clearance && p.y - r >= clearance && p.x + r <= side - clearance &&
           p.y + r <= side - clearance;
  };
  if (o.circle() && !ok(o.circle()->center, o.circle()->radius)) return false;
  for (const auto& b : o.boxes())
    for (const Vec2 c : b.corners())
      if (!ok(c, 0.0)) return false;
  return true;
}

std::optional<std::vector<Obstacle>> try_place(const WorldConfig& config, Rng& rng) {
  std::vector<Obstacle> placed;
  const double lo = config.wall_clearance;
  const double hi = config.arena_side - config.wall_clearance;
  for (int k = 0; k < config.n_obstacles; ++k) {
    bool done = false;
    for (int t = 0; t < kPlacementTries && !done; ++t) {
      const ShapeKind kind = config.obstacle_types[rng.index(config.obstacle_types.size())];
      const Vec2 center{rng.uniform(lo, hi), rng.uniform(lo, hi)};
      Obstacle o = sample_obstacle(rng, kind, center);
      if (!inside_with_clearance(o, config.arena_side, config.wall_clearance)) continue;
      const bool clear = std::all_of(placed.begin(), placed.end(), [&](const Obstacle& p) {
        return o.distance_to(p) >= config.obstacle_clearance;
      });
      if (!clear) continue;
      placed.push_back(std::move(o));
      done = true;
    }
    if (!done) return std::nullopt;
  }
  return placed;
}

std::pair<std::vector<Obstacle>, std::shared_ptr<const OccupancyGrid>> build_map(
    const WorldConfig& config, std::uint64_t seed) {
  config.validate();
  const Rng root(seed);
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    Rng rng = root.substream(static_cast<std::uint64_t>(attempt));
    auto obstacles = try_place(config, rng);
    if (!obstacles) continue;
    auto grid = std::make_shared<const OccupancyGrid>(config.arena_side, config.grid_resolution,
                                                      *obstacles, config.agent_radius);
    if (!grid->free_space_connected()) continue;
    return {std::move(*obstacles), std::move(grid)};
  }
  throw UnsatisfiableConfig("could not place " + std::to_string(config.n_obstacles) +
                            " obstacles after " + std::to_string(kMaxAttempts) + " attempts");
}

void hash_bytes(std::uint64_t& h, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (8 * i)) & 0xffu;
    h *= 0x100000001b3ULL;
  }
}

}  // namespace

int WorldState::hiders_alive() const {
  return static_cast<int>(std::count_if(agents.begin(), agents.end(), [](const AgentState& a) {
    return a.is_hider() && a.alive;
  }));
}

std::vector<Obstacle> generate_map(const WorldConfig& config, std::uint64_t seed) {
  return build_map(config, seed).first;
}

std::vector<AgentState> spawn_agents(const OccupancyGrid& grid, const WorldConfig& config,
                                     std::uint64_t seed) {
  std::vector<int> band;
  for (int i = 0; i < grid.size(); ++i) {
    if (grid.blocked(i)) continue;
    const Vec2 c = grid.center(i);
    const double wall = std::min({c.x, c.y, config.arena_side - c.x, config.arena_side - c.y});
    if (wall <= config.spawn_band) band.push_back(i);
  }
  const Rng root(seed);
  const int n = config.n_agents();
  const Vec2 middle{config.arena_side / 2, config.arena_side / 2};
  for (int attempt = 0; attempt < kMaxAttempts && !band.empty(); ++attempt) {
    Rng rng = root.substream(static_cast<std::uint64_t>(attempt));
    std::vector<AgentState> agents;
    for (int id = 0; id < n; ++id) {
      for (int t = 0; t < kPlacementTries; ++t) {
        const Vec2 p = grid.center(band[rng.index(band.size())]);
        const bool apart = std::all_of(agents.begin(), agents.end(), [&](const AgentState& a) {
          return distance(a.position, p) >= config.spawn_separation;
        });
        if (!apart) continue;
        AgentState a;
        a.id = id;
        a.role = id < config.n_seekers ? Role::Seeker : Role::Hider;
        a.position = p;
        a.anchor = p;
        a.orientation = std::atan2(middle.y - p.y, middle.x - p.x);
        a.speed = a.is_seeker() ? config.seeker_speed : config.hider_speed;
        agents.push_back(std::move(a));
        break;
      }
      if (static_cast<int>(agents.size()) != id + 1) break;
    }
    if (static_cast<int>(agents.size()) == n) return agents;
  }
  throw UnsatisfiableConfig("could not spawn " + std::to_string(n) + " agents " +
                            std::to_string(config.spawn_separation) + " m apart after " +
                            std::to_string(kMaxAttempts) + " attempts");
}

WorldState make_world(const WorldConfig& config, std::uint64_t seed) {
  WorldState w;
  w.config = config;
  w.seed = seed;
  auto [obstacles, grid] = build_map(config, derive_seed(seed, stream::kMap));
  w.obstacles = std::move(obstacles);
  w.grid = std::move(grid);
  w.agents = spawn_agents(*w.grid, config, derive_seed(seed, stream::kSpawn));
  return w;
}

void step(WorldState& world, const CommandMap& commands) {
  const auto& grid = *world.grid;
  for (const auto& [id, wp] : commands) {
    if (id < 0 || id >= static_cast<int>(world.agents.size()))
      throw InvalidCommand("command for unknown agent " + std::to_string(id));
    if (!world.agents[id].alive)
      throw InvalidCommand("command for caught agent " + std::to_string(id));
    if (!grid.in_arena(wp.position) || !std::isfinite(wp.position.x) ||
        !std::isfinite(wp.position.y))
      throw InvalidCommand("waypoint for agent " + std::to_string(id) + " is outside the arena");
  }

  for (const auto& [id, wp] : commands) {
    AgentState& a = world.agents[id];
    if (a.waypoint && *a.waypoint == wp && a.path_index <= a.path.size()) continue;
    a.waypoint = wp;
    PlannedPath plan;
    try {
      plan = plan_path(a.position, wp.position, grid, a.anchor);
    } catch (const UnreachableGoal& e) {
      try {
        plan = plan_path(a.position, e.nearest_reachable, grid, a.anchor);
      } catch (const UnreachableGoal&) {
        plan.waypoints.clear();
      }
    }
    a.path = std::move(plan.waypoints);
    a.path_index = 0;
    a.anchor = a.position;
  }

  const double dt = world.config.physics_dt;
  for (AgentState& a : world.agents) {
    if (!a.alive) continue;
    const Vec2 before = a.position;
    double budget = a.speed * dt;
    while (budget > 0.0 && a.path_index < a.path.size()) {
      const Vec2 target = a.path[a.path_index];
      const double d = distance(a.position, target);
      if (d <= budget) {
        a.position = target;
        a.anchor = target;
        budget -= d;
        ++a.path_index;
      } else {
        a.position = a.position + (target - a.position) * (budget / d);
        budget = 0.0;
      }
    }
    const Vec2 moved = a.position - before;
    if (norm_sq(moved) > 0.0) a.orientation = std::atan2(moved.y, moved.x);
    if (a.path_index >= a.path.size() && a.waypoint && a.waypoint->orientation &&
        !a.path.empty())
      a.orientation = *a.waypoint->orientation;
    a.velocity = moved * (1.0 / dt);
  }

  ++world.tick;
  const double now = world.time();
  for (AgentState& h : world.agents) {
    if (!h.is_hider() || !h.alive) continue;
    for (const AgentState& s : world.agents) {
      if (!s.is_seeker()) continue;
      if (distance(s.position, h.position) <= world.config.catch_radius) {
        h.alive = false;
        h.catch_time = now;
        h.path.clear();
        h.path_index = 0;
        h.velocity = {};
        break;
      }
    }
  }
}

Termination check_termination(const WorldState& world) {
  if (world.hiders_alive() == 0) return Termination::Success;
  if (world.tick >= world.config.max_ticks()) return Termination::Timeout;
  return Termination::Ongoing;
}

std::uint64_t hash_state(const WorldState& world, std::uint64_t hash) {
  hash_bytes(hash, static_cast<std::uint64_t>(world.tick));
  for (const AgentState& a : world.agents) {
    hash_bytes(hash, static_cast<std::uint64_t>(a.id) | (a.alive ? 1ULL << 32 : 0ULL));
    hash_bytes(hash, std::bit_cast<std::uint64_t>(a.position.x));
    hash_bytes(hash, std::bit_cast<std::uint64_t>(a.position.y));
    hash_bytes(hash, std::bit_cast<std::uint64_t>(a.orientation));
  }
  return hash;
}

}  // namespace hs
