#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "hideseek/episode.hpp"
#include "hideseek/eval.hpp"
#include "hideseek/world.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace hs;

namespace {

double wall_distance(Vec2 p, double side) { return std::min({p.x, p.y, side - p.x, side - p.y}); }

}  // namespace

TEST(Map, DefaultConfigHonorsClearances) {
  WorldConfig c;
  for (std::uint64_t seed : {42ULL, 7ULL, 123456789ULL}) {
    const auto obstacles = generate_map(c, seed);
    ASSERT_EQ(obstacles.size(), 5u);
    for (std::size_t i = 0; i < obstacles.size(); ++i) {
      const Obstacle& o = obstacles[i];
      // Sample the boundary densely: every point of the region keeps 1 m to the walls.
      for (int k = 0; k < 4000; ++k) {
        const double a = 2.0 * M_PI * k / 4000;
        const Vec2 dir = unit_from_angle(a);
        double t = 0.0;
        while (oracle::contains(o, o.center() + dir * (t + 0.01))) t += 0.01;
        EXPECT_GE(wall_distance(o.center() + dir * t, c.arena_side), c.wall_clearance - 0.02);
      }
      for (std::size_t j = i + 1; j < obstacles.size(); ++j)
        EXPECT_GE(o.distance_to(obstacles[j]), c.obstacle_clearance - 1e-9);
    }
    const OccupancyGrid grid(c.arena_side, c.grid_resolution, obstacles, c.agent_radius);
    EXPECT_TRUE(grid.free_space_connected());
  }
}

TEST(Map, SizeRangesPerShape) {
  WorldConfig c;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    for (const Obstacle& o : generate_map(c, seed)) {
      const auto& k = o.size_params();
      switch (o.shape()) {
        case ShapeKind::Cylinder:
          EXPECT_GE(k[0], 1.5);
          EXPECT_LE(k[0], 3.0);
          break;
        case ShapeKind::Rectangle:
          EXPECT_GE(k[0], 4.0);
          EXPECT_LE(k[0], 8.0);
          break;
        default:
          EXPECT_GE(std::max(k[0], k[1]), 4.0);
          EXPECT_LE(std::max(k[0], k[1]), 8.0);
      }
    }
  }
}

TEST(Map, DeterministicInSeed) {
  WorldConfig c;
  EXPECT_EQ(generate_map(c, 42), generate_map(c, 42));
  EXPECT_NE(generate_map(c, 42), generate_map(c, 43));
}

TEST(Map, NoObstaclesLeavesWholeArenaFree) {
  WorldConfig c;
  c.n_obstacles = 0;
  EXPECT_TRUE(generate_map(c, 5).empty());
  const OccupancyGrid grid(c.arena_side, c.grid_resolution, {}, c.agent_radius);
  // Only the ring of cells closer than the agent radius to a wall is blocked.
  EXPECT_EQ(grid.free_count(), 98 * 98);
}

TEST(Map, UnsatisfiableConfigThrows) {
  WorldConfig c;
  c.arena_side = 12.0;
  c.n_obstacles = 4;
  EXPECT_THROW(generate_map(c, 1), UnsatisfiableConfig);
}

TEST(Spawn, BandSeparationAndFreeSpace) {
  WorldConfig c;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const WorldState w = make_world(c, seed);
    ASSERT_EQ(w.agents.size(), 6u);
    for (std::size_t i = 0; i < w.agents.size(); ++i) {
      const AgentState& a = w.agents[i];
      EXPECT_EQ(a.id, static_cast<int>(i));
      EXPECT_EQ(a.is_seeker(), a.id < 3);
      EXPECT_LE(wall_distance(a.position, c.arena_side), c.spawn_band);
      EXPECT_TRUE(w.grid->point_free(a.position));
      EXPECT_EQ(a.speed, a.is_seeker() ? c.seeker_speed : c.hider_speed);
      for (std::size_t j = i + 1; j < w.agents.size(); ++j)
        EXPECT_GE(distance(a.position, w.agents[j].position), c.spawn_separation);
    }
  }
}

TEST(Spawn, MinimalAndDeterministic) {
  WorldConfig c;
  c.set_setting({1, 1});
  const WorldState a = make_world(c, 9), b = make_world(c, 9);
  ASSERT_EQ(a.agents.size(), 2u);
  EXPECT_GE(distance(a.agents[0].position, a.agents[1].position), 10.0);
  EXPECT_EQ(a.agents[0].position, b.agents[0].position);
  EXPECT_EQ(a.agents[1].position, b.agents[1].position);
}

TEST(Spawn, TooManyAgentsForTheBandThrows) {
  WorldConfig c;
  c.arena_side = 20.0;
  c.n_obstacles = 0;
  c.set_setting({4, 4});
  c.spawn_separation = 15.0;
  const OccupancyGrid grid(c.arena_side, c.grid_resolution, {}, c.agent_radius);
  EXPECT_THROW(spawn_agents(grid, c, 3), UnsatisfiableConfig);
}

TEST(Step, OpenFieldKinematics) {
  WorldConfig c;
  WorldState w = fixture::world(c, {{5, 5}}, {{40, 40}});
  step(w, {{0, {{15, 5}, std::nullopt}}});
  EXPECT_NEAR(w.agent(0).position.x, 5.5, 1e-12);
  EXPECT_NEAR(w.agent(0).position.y, 5.0, 1e-12);
  EXPECT_NEAR(w.agent(0).orientation, 0.0, 1e-12);
  EXPECT_EQ(w.tick, 1);
  // No new command: the agent keeps going.
  step(w, {});
  EXPECT_NEAR(w.agent(0).position.x, 6.0, 1e-12);
}

TEST(Step, ArrivesAndAppliesWaypointOrientation) {
  WorldConfig c;
  WorldState w = fixture::world(c, {{5, 5}}, {{40, 40}});
  step(w, {{0, {{6, 5}, 1.0}}});
  step(w, {});
  step(w, {});
  EXPECT_NEAR(w.agent(0).position.x, 6.0, 1e-12);
  EXPECT_NEAR(w.agent(0).orientation, 1.0, 1e-12);
}

TEST(Step, CatchWithinRadius) {
  WorldConfig c;
  WorldState w = fixture::world(c, {{10, 10}}, {{10.9, 10}});
  step(w, {});
  EXPECT_FALSE(w.agent(1).alive);
  ASSERT_TRUE(w.agent(1).catch_time.has_value());
  EXPECT_NEAR(*w.agent(1).catch_time, 0.1, 1e-12);
  EXPECT_EQ(check_termination(w), Termination::Success);

  WorldState far = fixture::world(c, {{10, 10}}, {{11.2, 10}});
  step(far, {});
  EXPECT_TRUE(far.agent(1).alive);
}

TEST(Step, RejectsBadCommandsWithoutChangingTheWorld) {
  WorldConfig c;
  WorldState w = fixture::world(c, {{10, 10}}, {{30, 30}, {40, 10}});
  w.agent(2).alive = false;
  const std::uint64_t before = hash_state(w);
  EXPECT_THROW(step(w, {{7, {{20, 20}, std::nullopt}}}), InvalidCommand);
  EXPECT_THROW(step(w, {{2, {{20, 20}, std::nullopt}}}), InvalidCommand);
  EXPECT_THROW(step(w, {{0, {{20, 20}, std::nullopt}}, {1, {{60, 20}, std::nullopt}}}), InvalidCommand);
  EXPECT_EQ(hash_state(w), before);
  EXPECT_EQ(w.tick, 0);
}

TEST(Step, DetourNeverCrossesObstacle) {
  WorldConfig c;
  const Obstacle wall(ShapeKind::Rectangle, {25, 25}, 0.0, {1, 12});
  WorldState w = fixture::world(c, {{20, 25}}, {{45, 45}}, {wall});
  Vec2 prev = w.agent(0).position;
  step(w, {{0, {{30, 25}, std::nullopt}}});
  for (int t = 0; t < 200; ++t) {
    const Vec2 now = w.agent(0).position;
    ASSERT_FALSE(oracle::segment_hits(wall, prev, now, 0.5 - 1e-6, 1e-3)) << "tick " << w.tick;
    ASSERT_LE(distance(prev, now), c.seeker_speed * c.physics_dt + 1e-9);
    prev = now;
    step(w, {});
  }
  EXPECT_LT(distance(w.agent(0).position, {30, 25}), 1e-9);
}

TEST(Termination, Definitions) {
  WorldConfig c;
  WorldState w = fixture::world(c, {{5, 5}}, {{20, 20}, {30, 30}, {40, 40}});
  w.tick = 300;
  EXPECT_EQ(check_termination(w), Termination::Ongoing);
  w.tick = 800;
  for (int id : {1, 2, 3}) w.agent(id).alive = false;
  EXPECT_EQ(check_termination(w), Termination::Success);
  w.agent(3).alive = true;
  w.tick = 1200;
  EXPECT_EQ(check_termination(w), Termination::Timeout);
}

TEST(Episode, SafetyMonotonicityAndClockOverRollouts) {
  WorldConfig c;
  SimConfig sc;
  sc.world = c;
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    EpisodeRunner r(sc, default_bindings(c.setting()), seed);
    std::vector<Vec2> prev;
    std::vector<bool> alive;
    for (const auto& a : r.world().agents) {
      prev.push_back(a.position);
      alive.push_back(a.alive);
    }
    // Checked at decision boundaries; per-tick segments are covered below.
    while (!r.finished()) {
      r.advance();
      for (const auto& a : r.world().agents) {
        const Vec2 p = a.position;
        ASSERT_TRUE(r.world().grid->inside_walls(p));
        for (const auto& o : r.world().obstacles) ASSERT_FALSE(oracle::contains(o, p, 0.5 - 1e-6));
        ASSERT_LE(distance(prev[a.id], p), a.speed * c.decision_period() + 1e-9);
        ASSERT_FALSE(!alive[a.id] && a.alive);
        prev[a.id] = p;
        alive[a.id] = a.alive;
      }
    }
    const EpisodeResult res = r.result();
    EXPECT_LE(res.duration, c.max_time + c.physics_dt);
    EXPECT_NEAR(res.duration, res.ticks * c.physics_dt, 1e-9);
    const bool all = std::all_of(res.catch_times.begin(), res.catch_times.end(),
                                 [&](const auto& t) { return t && *t <= c.max_time; });
    EXPECT_EQ(res.outcome == Outcome::Success, all);
  }
}

TEST(Episode, PerTickSegmentsClearObstacles) {
  SimConfig sc;
  WorldState w = make_world(sc.world, 77);
  // Drive every agent towards far corners through the map, checking each
  // movement segment against the obstacle oracle.
  CommandMap cmds;
  for (const auto& a : w.agents) cmds[a.id] = {{50.0 - a.position.x, 50.0 - a.position.y}, std::nullopt};
  step(w, cmds);
  std::vector<Vec2> prev;
  for (int t = 0; t < 300; ++t) {
    prev.clear();
    for (const auto& a : w.agents) prev.push_back(a.position);
    step(w, {});
    for (const auto& a : w.agents) {
      if (!a.alive) continue;
      for (const auto& o : w.obstacles)
        ASSERT_FALSE(oracle::segment_hits(o, prev[a.id], a.position, 0.5 - 1e-6, 5e-3));
    }
  }
}

TEST(Episode, Deterministic) {
  SimConfig sc;
  for (std::uint64_t seed : {1ULL, 2ULL, 99ULL}) {
    const auto a = run_episode(sc, default_bindings(sc.world.setting()), seed);
    const auto b = run_episode(sc, default_bindings(sc.world.setting()), seed);
    EXPECT_EQ(a.trajectory_hash, b.trajectory_hash);
    EXPECT_EQ(a.ticks, b.ticks);
  }
}

TEST(Episode, SlowHiderIsAlwaysCaughtInOpenArena) {
  SimConfig sc;
  sc.world.set_setting({1, 1});
  sc.world.n_obstacles = 0;
  sc.world.hider_speed = 2.0;
  sc.world.enforce_role_asymmetry = false;
  for (std::uint64_t seed = 0; seed < 20; ++seed)
    EXPECT_EQ(run_episode(sc, default_bindings(sc.world.setting()), seed).outcome, Outcome::Success)
        << "seed " << seed;
}

TEST(Episode, FastHiderFarAwayEscapesPurePursuit) {
  SimConfig sc;
  sc.world.set_setting({1, 1});
  sc.world.n_obstacles = 0;
  sc.world.spawn_separation = 20.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed)
    EXPECT_EQ(run_episode(sc, default_bindings(sc.world.setting()), seed).outcome, Outcome::Timeout)
        << "seed " << seed;
}

TEST(Config, ValidationAndRoundTrip) {
  SimConfig sc;
  sc.world.seed = 1234567890123ULL;
  sc.world.hider_speed = 7.25;
  sc.heuristics.lambda_wall = 3.5;
  std::istringstream in(to_config_text(sc));
  const SimConfig back = parse_config(in);
  EXPECT_EQ(to_config_text(back), to_config_text(sc));

  WorldConfig bad;
  bad.hider_speed = 4.0;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad.enforce_role_asymmetry = false;
  EXPECT_NO_THROW(bad.validate());
  WorldConfig ranges;
  ranges.seeker_range = 9.0;
  EXPECT_THROW(ranges.validate(), ConfigError);
  WorldConfig ticks;
  ticks.max_time = 120.05;
  EXPECT_THROW(ticks.validate(), ConfigError);
  std::istringstream unknown("arena_side = 50\nwarp_speed = 9\n");
  EXPECT_THROW(parse_config(unknown), ConfigError);
}
