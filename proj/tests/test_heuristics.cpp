#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "hideseek/heuristics.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace hs;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<const AgentState*> seekers_of(const WorldState& w) {
  std::vector<const AgentState*> out;
  for (const auto& a : w.agents)
    if (a.is_seeker()) out.push_back(&a);
  return out;
}

double angle_of(int k, int n) { return 2.0 * kPi * k / n; }

double angle_gap(double a, double b) { return std::abs(wrap_angle(a - b)); }

// Earliest time a pursuer from `s` at speed vs can stand where the hider is,
// found by scanning time at 1e-5 s.
std::optional<double> brute_intercept(Vec2 h, Vec2 dir, double vh, Vec2 s, double vs, double t_max) {
  for (double t = 0.0; t <= t_max; t += 1e-5)
    if (distance(h + dir * (vh * t), s) <= vs * t) return t;
  return std::nullopt;
}

// Rolls the builtin heuristics forward for `ticks` physics ticks.
void rollout(WorldState& w, int ticks, const HeuristicParams& params = {}) {
  std::vector<SeekerMemory> memory(w.agents.size());
  std::vector<SeenGrid> seen(w.agents.size(), SeenGrid(*w.grid));
  Rng rng(5);
  for (int t = 0; t < ticks; ++t) {
    if (t % w.config.control_period == 0) {
      CommandMap cmds;
      for (const auto& a : w.agents) {
        if (!a.alive) continue;
        if (a.is_seeker()) {
          update_seen(seen[a.id], a.position, w.obstacles, w.config.seeker_range);
          cmds[a.id] = seeker_heuristic(a, visible_opponents(w, a, w.config.seeker_range), seen[a.id],
                                        *w.grid, rng, memory[a.id], params);
        } else {
          cmds[a.id] = hider_heuristic(a, visible_opponents(w, a, w.config.hider_range), *w.grid,
                                       w.config, params);
        }
      }
      step(w, cmds);
    } else {
      step(w, {});
    }
    if (check_termination(w) != Termination::Ongoing) return;
  }
}

}  // namespace

TEST(Seeker, ChasesNearestVisibleHider) {
  WorldConfig c;
  const WorldState w = fixture::world(c, {{20, 20}}, {{28, 20}, {20, 25}});
  SeenGrid seen(*w.grid);
  SeekerMemory mem;
  Rng rng(1);
  const auto visible = visible_opponents(w, w.agent(0), c.seeker_range);
  ASSERT_EQ(visible.size(), 2u);
  const Waypoint wp = seeker_heuristic(w.agent(0), visible, seen, *w.grid, rng, mem);
  EXPECT_EQ(wp.position, (Vec2{20, 25}));
}

TEST(Seeker, TargetIsArgminWithLowerIdOnTies) {
  WorldConfig c;
  Rng gen(2);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<Vec2> hiders;
    const int n = static_cast<int>(gen.uniform_int(1, 4));
    const Vec2 self{25, 25};
    for (int i = 0; i < n; ++i) {
      // Integer offsets on a small lattice make exact distance ties common.
      hiders.push_back({self.x + static_cast<double>(gen.uniform_int(-5, 5)),
                        self.y + static_cast<double>(gen.uniform_int(-5, 5))});
    }
    const WorldState w = fixture::world(c, {self}, hiders);
    std::vector<const AgentState*> visible;
    for (int i = 1; i <= n; ++i) visible.push_back(&w.agent(i));
    SeenGrid seen(*w.grid);
    SeekerMemory mem;
    Rng rng(3);
    const Waypoint wp = seeker_heuristic(w.agent(0), visible, seen, *w.grid, rng, mem);
    int expected = 1;
    for (int i = 2; i <= n; ++i)
      if (distance(self, w.agent(i).position) < distance(self, w.agent(expected).position)) expected = i;
    ASSERT_EQ(wp.position, w.agent(expected).position) << "trial " << trial;
  }
}

TEST(Seeker, ExploresNearestUnseenFreeCell) {
  WorldConfig c;
  const WorldState w = fixture::world(c, {{10, 10}}, {{40, 40}});
  SeenGrid seen(*w.grid);
  update_seen(seen, {10, 10}, {}, c.seeker_range);
  SeekerMemory mem;
  Rng rng(1);
  const Waypoint wp = seeker_heuristic(w.agent(0), {}, seen, *w.grid, rng, mem);
  double best = 1e9;
  for (int i = 0; i < w.grid->size(); ++i)
    if (!w.grid->blocked(i) && !seen.seen(i)) best = std::min(best, distance(w.grid->center(i), {10, 10}));
  EXPECT_NEAR(distance(wp.position, {10, 10}), best, 1e-12);
  EXPECT_FALSE(seen.seen(w.grid->cell_at(wp.position)));
}

TEST(Seeker, PatrolsRandomFreeCellsOnceEverythingIsSeen) {
  WorldConfig c;
  const WorldState w = fixture::world(c, {{10, 10}}, {{40, 40}});
  SeenGrid seen(*w.grid);
  for (int i = 0; i < seen.size(); ++i) seen.mark(i);
  SeekerMemory m1, m2;
  Rng r1(8), r2(8);
  const Waypoint a = seeker_heuristic(w.agent(0), {}, seen, *w.grid, r1, m1);
  const Waypoint b = seeker_heuristic(w.agent(0), {}, seen, *w.grid, r2, m2);
  EXPECT_EQ(a, b);
  EXPECT_TRUE(w.grid->point_free(a.position));
  // Kept until reached.
  EXPECT_EQ(seeker_heuristic(w.agent(0), {}, seen, *w.grid, r1, m1), a);
}

TEST(Seeker, DetoursAroundLShapeWithoutCrossingIt) {
  WorldConfig c;
  const Obstacle ell(ShapeKind::LShape, {25, 25}, kPi, {8, 8, 1.5});
  WorldState w = fixture::world(c, {{15, 25}}, {{27, 27}}, {ell});
  w.agent(1).speed = 0.0;  // a parked target behind the L
  std::vector<Vec2> prev;
  for (int t = 0; t < 400 && w.agent(1).alive; ++t) {
    const Vec2 before = w.agent(0).position;
    rollout(w, 1);
    ASSERT_FALSE(oracle::segment_hits(ell, before, w.agent(0).position, 0.5 - 1e-6, 1e-3));
  }
}

TEST(Intercept, MatchesTimeScan) {
  Rng rng(4);
  for (int trial = 0; trial < 300; ++trial) {
    const Vec2 h{rng.uniform(10, 40), rng.uniform(10, 40)}, s{rng.uniform(10, 40), rng.uniform(10, 40)};
    const Vec2 dir = unit_from_angle(rng.uniform(0, 2 * kPi));
    const double horizon = 5.0;
    const double t = intercept_time(h, dir, 8.0, s, 5.0, horizon);
    const auto ref = brute_intercept(h, dir, 8.0, s, 5.0, horizon);
    if (ref) {
      EXPECT_NEAR(t, *ref, 2e-5);
    } else {
      // Never caught within the horizon: the surrogate exceeds it.
      EXPECT_GE(t, horizon - 2e-5);
    }
  }
}

TEST(Escape, SingleSeekerDueEastFleesDueWest) {
  WorldConfig c;
  const WorldState w = fixture::world(c, {{31, 25}}, {{25, 25}});
  const int k = best_escape_direction(w.agent(1), seekers_of(w), *w.grid, c, {});
  EXPECT_EQ(k, 16);
  const Waypoint wp = hider_heuristic(w.agent(1), seekers_of(w), *w.grid, c, {});
  EXPECT_NEAR(wp.position.x, 20.0, 1e-9);
  EXPECT_NEAR(wp.position.y, 25.0, 1e-9);
}

TEST(Escape, IdleWithoutVisibleSeekers) {
  WorldConfig c;
  const WorldState w = fixture::world(c, {{40, 25}}, {{25, 25}});
  const auto visible = visible_opponents(w, w.agent(1), c.hider_range);
  EXPECT_TRUE(visible.empty());
  EXPECT_EQ(hider_heuristic(w.agent(1), visible, *w.grid, c, {}).position, (Vec2{25, 25}));
}

TEST(Escape, TwoSeekersAheadWithWallBehindMatchesFineArgmax) {
  WorldConfig c;
  const Vec2 h{25, 2};
  const Vec2 s1 = h + unit_from_angle(kPi / 2 - kPi / 4) * 7.0;
  const Vec2 s2 = h + unit_from_angle(kPi / 2 + kPi / 4) * 7.0;
  const WorldState w = fixture::world(c, {s1, s2}, {h});
  const auto seekers = seekers_of(w);
  const AgentState& hider = w.agent(2);
  const int k = best_escape_direction(hider, seekers, *w.grid, c, {});
  const double coarse = angle_of(k, 32);

  // Brute force over 3600 directions with the same score.
  double best = -1e18, fine = 0.0;
  for (int i = 0; i < 3600; ++i) {
    const double a = angle_of(i, 3600);
    const double s = escape_score(unit_from_angle(a), hider, seekers, *w.grid, c, {});
    if (s > best) {
      best = s;
      fine = a;
    }
  }
  // The scene is mirror symmetric about the seeker bisector (x = 25), so
  // the fine maximum may sit on either side.
  const double mirror = wrap_angle(kPi - fine);
  const double bin = 2.0 * kPi / 32;
  EXPECT_TRUE(angle_gap(coarse, fine) <= bin + 1e-9 || angle_gap(coarse, mirror) <= bin + 1e-9)
      << "coarse " << coarse << " fine " << fine;
  const EscapeTerms t = escape_terms(unit_from_angle(coarse), hider, seekers, *w.grid, c, {});
  EXPECT_GE(t.intercept, HeuristicParams{}.escape_horizon);
}

TEST(Escape, WallPenaltyOutweighsMirroredOpenDirection) {
  WorldConfig c;
  // Grown wall at y = 0.5, so heading south leaves 0.5 m of free ray.
  const WorldState w = fixture::world(c, {{34, 1}}, {{25, 1}});
  const auto seekers = seekers_of(w);
  const AgentState& hider = w.agent(1);
  const double south = escape_score({0, -1}, hider, seekers, *w.grid, c, {});
  const double north = escape_score({0, 1}, hider, seekers, *w.grid, c, {});
  const EscapeTerms t = escape_terms({0, -1}, hider, seekers, *w.grid, c, {});
  EXPECT_NEAR(t.wall, 2.0 / 0.5, 1e-9);
  EXPECT_LT(south, north);
  const int k = best_escape_direction(hider, seekers, *w.grid, c, {});
  const Vec2 dir = unit_from_angle(angle_of(k, 32));
  EXPECT_GT(wall_distance(hider.position, dir, c.arena_side, c.hider_range, c.agent_radius), 0.5);
}

TEST(Escape, ArgmaxInvariantUnderUniformScaling) {
  WorldConfig c;
  Rng gen(6);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<Obstacle> obstacles;
    if (trial % 2) obstacles.push_back(oracle::random_obstacle(gen, {15, 15}, {35, 35}));
    Vec2 h;
    do h = {gen.uniform(2, 48), gen.uniform(2, 48)};
    while (!obstacles.empty() && obstacles[0].contains(h, 1.0));
    std::vector<Vec2> ss;
    for (int i = 0, n = static_cast<int>(gen.uniform_int(1, 3)); i < n; ++i)
      ss.push_back(h + unit_from_angle(gen.uniform(0, 2 * kPi)) * gen.uniform(2, 10));
    WorldState w = fixture::world(c, ss, {h}, obstacles);
    const HeuristicParams base;
    const int k0 = best_escape_direction(w.agents.back(), seekers_of(w), *w.grid, c, base);
    for (double scale : {0.5, 2.0, 4.0}) {
      // Speeds divided by c multiply every time by c; lambdas and the
      // horizon are multiplied to match.
      WorldState ws = w;
      for (auto& a : ws.agents) a.speed /= scale;
      HeuristicParams p = base;
      p.lambda_wall *= scale;
      p.lambda_obstacle *= scale;
      p.escape_horizon *= scale;
      const int k = best_escape_direction(ws.agents.back(), seekers_of(ws), *ws.grid, c, p);
      ASSERT_EQ(k, k0) << "trial " << trial << " scale " << scale;
    }
  }
}

TEST(Escape, TermsScaleLinearly) {
  WorldConfig c;
  const WorldState w = fixture::world(c, {{30, 22}, {22, 30}}, {{24, 24}});
  const auto seekers = seekers_of(w);
  for (int k = 0; k < 32; ++k) {
    const Vec2 dir = unit_from_angle(angle_of(k, 32));
    const EscapeTerms t = escape_terms(dir, w.agent(2), seekers, *w.grid, c, {});
    EXPECT_NEAR(t.score(), escape_score(dir, w.agent(2), seekers, *w.grid, c, {}), 1e-12);
    EXPECT_GT(t.wall, 0.0);
    EXPECT_GT(t.obstacle, 0.0);
  }
}

TEST(Escape, CorneredHiderEscapesInterceptAndSurvives) {
  WorldConfig c;
  const Vec2 h{3, 3};
  // Seekers at bearings 15 and 80 degrees: the gap between them is the widest.
  const Vec2 s1 = h + unit_from_angle(15.0 * kPi / 180) * 8.0;
  const Vec2 s2 = h + unit_from_angle(80.0 * kPi / 180) * 8.0;
  WorldState w = fixture::world(c, {s1, s2}, {h});
  const int k = best_escape_direction(w.agent(2), seekers_of(w), *w.grid, c, {});
  const EscapeTerms t =
      escape_terms(unit_from_angle(angle_of(k, 32)), w.agent(2), seekers_of(w), *w.grid, c, {});
  EXPECT_GE(t.intercept, HeuristicParams{}.escape_horizon);
  rollout(w, static_cast<int>(std::ceil(5.0 / w.config.physics_dt)));
  EXPECT_TRUE(w.agent(2).alive);
}
