#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hideseek/geometry.hpp"

namespace hs {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Team sizes, written "3v3" (seekers v hiders).
struct Setting {
  int n_seekers = 3;
  int n_hiders = 3;

  std::string str() const { return std::to_string(n_seekers) + "v" + std::to_string(n_hiders); }
  static Setting parse(std::string_view text);
  bool operator==(const Setting&) const = default;
};

struct WorldConfig {
  double arena_side = 50.0;
  int n_obstacles = 5;
  std::vector<ShapeKind> obstacle_types = {ShapeKind::Cross, ShapeKind::Rectangle,
                                           ShapeKind::LShape, ShapeKind::Cylinder};
  double max_time = 120.0;
  double seeker_speed = 5.0;
  double hider_speed = 8.0;
  double seeker_range = 16.0;
  double hider_range = 10.0;
  int n_seekers = 3;
  int n_hiders = 3;
  double physics_dt = 0.1;
  int control_period = 5;
  double catch_radius = 1.0;
  std::uint64_t seed = 0;

  // Map and planning geometry.
  double grid_resolution = 0.5;
  double agent_radius = 0.5;
  double wall_clearance = 1.0;
  double obstacle_clearance = 4.0;
  double spawn_band = 5.0;
  double spawn_separation = 10.0;

  /// Faster hiders and longer seeker sight are what make the task need
  /// teamwork. Ablations that slow the hider switch this off.
  bool enforce_role_asymmetry = true;

  Setting setting() const { return {n_seekers, n_hiders}; }
  void set_setting(Setting s) {
    n_seekers = s.n_seekers;
    n_hiders = s.n_hiders;
  }
  std::int64_t max_ticks() const;
  double decision_period() const { return physics_dt * control_period; }
  int n_agents() const { return n_seekers + n_hiders; }

  /// Throws ConfigError naming the first violated invariant.
  void validate() const;
};

/// Tunables of the scripted seeker and hider policies.
struct HeuristicParams {
  int escape_directions = 32;
  double escape_lookahead = 5.0;   // meters
  double lambda_wall = 2.0;
  double lambda_obstacle = 2.0;
  double escape_horizon = 5.0;     // seconds; ranks directions that never get intercepted
  double min_clearance = 0.05;     // floor for the clearance penalty denominator
  double waypoint_reached = 0.5;   // meters
};

struct SimConfig {
  WorldConfig world;
  HeuristicParams heuristics;
};

/// Line-oriented `key = value` format; `#` starts a comment. Unknown keys
/// are rejected. Keys mirror the struct field names; heuristic constants use
/// the `heuristic.` prefix and `obstacle_types` is a comma separated list.
SimConfig parse_config(std::istream& in);
SimConfig load_config(const std::string& path);
std::string to_config_text(const SimConfig& config);

/// Applies a single `key = value` assignment; used by the parser and CLIs.
void apply_config_value(SimConfig& config, std::string_view key, std::string_view value);

}  // namespace hs
