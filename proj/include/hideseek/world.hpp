#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "hideseek/config.hpp"
#include "hideseek/geometry.hpp"
#include "hideseek/occupancy.hpp"
#include "hideseek/rng.hpp"

namespace hs {

class UnsatisfiableConfig : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidCommand : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Role { Seeker, Hider };

struct Waypoint {
  Vec2 position;
  std::optional<double> orientation;
  bool operator==(const Waypoint&) const = default;
};

struct AgentState {
  int id = 0;
  Role role = Role::Seeker;
  Vec2 position;
  double orientation = 0.0;
  double speed = 0.0;
  bool alive = true;
  std::optional<Waypoint> waypoint;
  std::optional<double> catch_time;

  // Motion state: remaining polyline, the last vertex passed (always joined
  // to `position` by a free straight segment) and last-tick velocity.
  std::vector<Vec2> path;
  std::size_t path_index = 0;
  Vec2 anchor;
  Vec2 velocity;

  bool is_seeker() const { return role == Role::Seeker; }
  bool is_hider() const { return role == Role::Hider; }
};

/// Full ground truth of one episode. Seekers have ids [0, n_seekers), hiders
/// follow. Caught hiders stay in `agents` with alive=false.
struct WorldState {
  WorldConfig config;
  std::vector<Obstacle> obstacles;
  std::shared_ptr<const OccupancyGrid> grid;
  std::vector<AgentState> agents;
  std::int64_t tick = 0;
  std::uint64_t seed = 0;

  double time() const { return static_cast<double>(tick) * config.physics_dt; }
  const AgentState& agent(int id) const { return agents.at(static_cast<std::size_t>(id)); }
  AgentState& agent(int id) { return agents.at(static_cast<std::size_t>(id)); }
  int hiders_alive() const;
};

/// Places `config.n_obstacles` obstacles honoring wall and pairwise clearance
/// with connected free space. Each attempt uses its own substream of `seed`;
/// throws UnsatisfiableConfig after 100 failed attempts.
std::vector<Obstacle> generate_map(const WorldConfig& config, std::uint64_t seed);

/// Spawns seekers then hiders on free cell centers within the boundary band,
/// pairwise separated. Throws UnsatisfiableConfig after 100 failed attempts.
std::vector<AgentState> spawn_agents(const OccupancyGrid& grid, const WorldConfig& config,
                                     std::uint64_t seed);

/// Map, grid and spawns for an episode seed.
WorldState make_world(const WorldConfig& config, std::uint64_t seed);

/// Agent id -> new waypoint. Agents without an entry keep their waypoint.
using CommandMap = std::map<int, Waypoint>;

/// Advances one physics tick. Commands are validated first; on
/// InvalidCommand the world is left unchanged.
void step(WorldState& world, const CommandMap& commands);

enum class Termination { Ongoing, Success, Timeout };
Termination check_termination(const WorldState& world);

constexpr std::uint64_t kHashSeed = 0xcbf29ce484222325ULL;
/// FNV-1a fold of the tick and every agent's id, alive flag and pose bits.
std::uint64_t hash_state(const WorldState& world, std::uint64_t hash = kHashSeed);

// Substream keys derived from an episode seed.
namespace stream {
constexpr std::uint64_t kMap = 1;
constexpr std::uint64_t kSpawn = 2;
constexpr std::uint64_t kPolicyBase = 100;
}  // namespace stream

}  // namespace hs
