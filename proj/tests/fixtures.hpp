#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "hideseek/world.hpp"

namespace fixture {

/// World with hand-placed agents; seekers first, then hiders.
inline hs::WorldState world(hs::WorldConfig config, const std::vector<hs::Vec2>& seekers,
                            const std::vector<hs::Vec2>& hiders, std::vector<hs::Obstacle> obstacles = {}) {
  config.n_seekers = static_cast<int>(seekers.size());
  config.n_hiders = static_cast<int>(hiders.size());
  config.n_obstacles = static_cast<int>(obstacles.size());
  hs::WorldState w;
  w.config = config;
  w.obstacles = obstacles;
  w.grid = std::make_shared<const hs::OccupancyGrid>(config.arena_side, config.grid_resolution,
                                                     std::move(obstacles), config.agent_radius);
  int id = 0;
  auto add = [&](hs::Vec2 p, hs::Role role) {
    hs::AgentState a;
    a.id = id++;
    a.role = role;
    a.position = p;
    a.anchor = p;
    a.speed = role == hs::Role::Seeker ? config.seeker_speed : config.hider_speed;
    w.agents.push_back(a);
  };
  for (auto p : seekers) add(p, hs::Role::Seeker);
  for (auto p : hiders) add(p, hs::Role::Hider);
  return w;
}

}  // namespace fixture
