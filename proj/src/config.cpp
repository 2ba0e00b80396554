#include "hideseek/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace hs {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(std::string_view key, std::string_view v) {
  try {
    std::size_t used = 0;
    const std::string s(v);
    const double d = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing");
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + std::string(key) + "': expected a number, got '" +
                      std::string(v) + "'");
  }
}

template <typename Int>
Int to_int(std::string_view key, std::string_view v) {
  Int out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size())
    throw ConfigError("config key '" + std::string(key) + "': expected an integer, got '" +
                      std::string(v) + "'");
  return out;
}

bool to_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("config key '" + std::string(key) + "': expected true/false");
}

}  // namespace

Setting Setting::parse(std::string_view text) {
  const auto v = text.find('v');
  if (v == std::string_view::npos)
    throw ConfigError("setting must look like '3v3', got '" + std::string(text) + "'");
  Setting s;
  s.n_seekers = to_int<int>("setting", text.substr(0, v));
  s.n_hiders = to_int<int>("setting", text.substr(v + 1));
  return s;
}

std::int64_t WorldConfig::max_ticks() const {
  return static_cast<std::int64_t>(std::llround(max_time / physics_dt));
}

void WorldConfig::validate() const {
  const auto fail = [](const std::string& what) { throw ConfigError("invalid config: " + what); };
  if (!(arena_side > 0)) fail("arena_side must be positive");
  if (n_obstacles < 0) fail("n_obstacles must be non-negative");
  if (n_obstacles > 0 && obstacle_types.empty()) fail("obstacle_types is empty");
  if (n_seekers < 1 || n_seekers > 4) fail("n_seekers must be in 1..4");
  if (n_hiders < 1 || n_hiders > 4) fail("n_hiders must be in 1..4");
  if (!(physics_dt > 0)) fail("physics_dt must be positive");
  if (!(max_time > 0)) fail("max_time must be positive");
  const double ticks = max_time / physics_dt;
  if (std::abs(ticks - std::round(ticks)) > 1e-9 * std::max(1.0, ticks))
    fail("max_time / physics_dt must be integral");
  if (control_period < 1) fail("control_period must be at least 1");
  if (!(seeker_speed > 0) || !(hider_speed > 0)) fail("speeds must be positive");
  if (!(seeker_range > 0) || !(hider_range > 0)) fail("visual ranges must be positive");
  if (!(catch_radius > 0)) fail("catch_radius must be positive");
  if (!(grid_resolution > 0)) fail("grid_resolution must be positive");
  if (agent_radius < 0) fail("agent_radius must be non-negative");
  if (enforce_role_asymmetry) {
    if (!(hider_speed > seeker_speed)) fail("hider_speed must exceed seeker_speed");
    if (!(seeker_range > hider_range)) fail("seeker_range must exceed hider_range");
  }
}

void apply_config_value(SimConfig& config, std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  auto& w = config.world;
  auto& h = config.heuristics;
  if (key == "arena_side") w.arena_side = to_double(key, value);
  else if (key == "n_obstacles") w.n_obstacles = to_int<int>(key, value);
  else if (key == "obstacle_types") {
    w.obstacle_types.clear();
    std::string_view rest = value;
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const auto item = trim(rest.substr(0, comma));
      if (!item.empty()) {
        try {
          w.obstacle_types.push_back(shape_from_string(item));
        } catch (const std::invalid_argument& e) {
          throw ConfigError(e.what());
        }
      }
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
  } else if (key == "max_time") w.max_time = to_double(key, value);
  else if (key == "seeker_speed") w.seeker_speed = to_double(key, value);
  else if (key == "hider_speed") w.hider_speed = to_double(key, value);
  else if (key == "seeker_range") w.seeker_range = to_double(key, value);
  else if (key == "hider_range") w.hider_range = to_double(key, value);
  else if (key == "n_seekers") w.n_seekers = to_int<int>(key, value);
  else if (key == "n_hiders") w.n_hiders = to_int<int>(key, value);
  else if (key == "setting") w.set_setting(Setting::parse(value));
  else if (key == "physics_dt") w.physics_dt = to_double(key, value);
  else if (key == "control_period") w.control_period = to_int<int>(key, value);
  else if (key == "catch_radius") w.catch_radius = to_double(key, value);
  else if (key == "seed") w.seed = to_int<std::uint64_t>(key, value);
  else if (key == "grid_resolution") w.grid_resolution = to_double(key, value);
  else if (key == "agent_radius") w.agent_radius = to_double(key, value);
  else if (key == "wall_clearance") w.wall_clearance = to_double(key, value);
  else if (key == "obstacle_clearance") w.obstacle_clearance = to_double(key, value);
  else if (key == "spawn_band") w.spawn_band = to_double(key, value);
  else if (key == "spawn_separation") w.spawn_separation = to_double(key, value);
  else if (key == "enforce_role_asymmetry") w.enforce_role_asymmetry = to_bool(key, value);
  else if (key == "heuristic.escape_directions") h.escape_directions = to_int<int>(key, value);
  else if (key == "heuristic.escape_lookahead") h.escape_lookahead = to_double(key, value);
  else if (key == "heuristic.lambda_wall") h.lambda_wall = to_double(key, value);
  else if (key == "heuristic.lambda_obstacle") h.lambda_obstacle = to_double(key, value);
  else if (key == "heuristic.escape_horizon") h.escape_horizon = to_double(key, value);
  else if (key == "heuristic.min_clearance") h.min_clearance = to_double(key, value);
  else if (key == "heuristic.waypoint_reached") h.waypoint_reached = to_double(key, value);
  else throw ConfigError("unknown config key '" + std::string(key) + "'");
}

SimConfig parse_config(std::istream& in) {
  SimConfig config;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    try {
      apply_config_value(config, view.substr(0, eq), view.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  config.world.validate();
  return config;
}

SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

std::string to_config_text(const SimConfig& config) {
  const auto& w = config.world;
  const auto& h = config.heuristics;
  std::ostringstream out;
  out << std::setprecision(17);
  out << "arena_side = " << w.arena_side << '\n';
  out << "n_obstacles = " << w.n_obstacles << '\n';
  out << "obstacle_types = ";
  for (std::size_t i = 0; i < w.obstacle_types.size(); ++i)
    out << (i ? "," : "") << to_string(w.obstacle_types[i]);
  out << '\n';
  out << "max_time = " << w.max_time << '\n';
  out << "seeker_speed = " << w.seeker_speed << '\n';
  out << "hider_speed = " << w.hider_speed << '\n';
  out << "seeker_range = " << w.seeker_range << '\n';
  out << "hider_range = " << w.hider_range << '\n';
  out << "n_seekers = " << w.n_seekers << '\n';
  out << "n_hiders = " << w.n_hiders << '\n';
  out << "physics_dt = " << w.physics_dt << '\n';
  out << "control_period = " << w.control_period << '\n';
  out << "catch_radius = " << w.catch_radius << '\n';
  out << "seed = " << w.seed << '\n';
  out << "grid_resolution = " << w.grid_resolution << '\n';
  out << "agent_radius = " << w.agent_radius << '\n';
  out << "wall_clearance = " << w.wall_clearance << '\n';
  out << "obstacle_clearance = " << w.obstacle_clearance << '\n';
  out << "spawn_band = " << w.spawn_band << '\n';
  out << "spawn_separation = " << w.spawn_separation << '\n';
  out << "enforce_role_asymmetry = " << (w.enforce_role_asymmetry ? "true" : "false") << '\n';
  out << "heuristic.escape_directions = " << h.escape_directions << '\n';
  out << "heuristic.escape_lookahead = " << h.escape_lookahead << '\n';
  out << "heuristic.lambda_wall = " << h.lambda_wall << '\n';
  out << "heuristic.lambda_obstacle = " << h.lambda_obstacle << '\n';
  out << "heuristic.escape_horizon = " << h.escape_horizon << '\n';
  out << "heuristic.min_clearance = " << h.min_clearance << '\n';
  out << "heuristic.waypoint_reached = " << h.waypoint_reached << '\n';
  return out.str();
}

}  // namespace hs
