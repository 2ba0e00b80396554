#include "hideseek/guidance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hs {

using json = nlohmann::json;

std::string_view to_string(InterventionState s) {
  switch (s) {
    case InterventionState::Active: return "active";
    case InterventionState::Completed: return "completed";
    case InterventionState::Overridden: return "overridden";
    case InterventionState::Released: return "released";
  }
  return "unknown";
}

GuidanceCommand GuidanceCommand::from_json(const json& j) {
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string())
    throw CommandError("message must be an object with a string 'type'");
  const std::string type = j["type"];
  auto id = [&] {
    if (!j.contains("id") || !j["id"].is_number_integer()) throw CommandError(type + " needs an integer 'id'");
    return j["id"].get<int>();
  };
  if (type == "select") return select(id());
  if (type == "release") return release(id());
  if (type == "pause") return pause();
  if (type == "resume") return resume();
  if (type == "waypoint") {
    if (!j.contains("x") || !j.contains("y") || !j["x"].is_number() || !j["y"].is_number())
      throw CommandError("waypoint needs numeric 'x' and 'y'");
    return waypoint({j["x"].get<double>(), j["y"].get<double>()});
  }
  throw CommandError("unknown message type '" + type + "'");
}

GuidedSession::GuidedSession(const SimConfig& config, std::vector<PolicyBinding> bindings,
                             std::uint64_t seed, EpisodeOptions options)
    : runner_(config, std::move(bindings), seed, std::move(options)),
      n_seekers_(config.world.n_seekers),
      arena_side_(config.world.arena_side),
      arrive_radius_(config.heuristics.waypoint_reached) {}

void GuidedSession::submit(const GuidanceCommand& cmd) {
  std::lock_guard lock(mutex_);
  using T = GuidanceCommand::Type;
  switch (cmd.type) {
    case T::Select:
    case T::Release:
      if (cmd.id < 0 || cmd.id >= n_seekers_)
        throw CommandError("unknown seeker id " + std::to_string(cmd.id));
      if (cmd.type == T::Select) shadow_selected_ = cmd.id;
      break;
    case T::Waypoint:
      if (!shadow_selected_) throw CommandError("waypoint given with no seeker selected");
      if (!std::isfinite(cmd.point.x) || !std::isfinite(cmd.point.y) || cmd.point.x < 0 ||
          cmd.point.y < 0 || cmd.point.x > arena_side_ || cmd.point.y > arena_side_)
        throw CommandError("waypoint outside the arena");
      break;
    case T::Pause:
    case T::Resume:
      break;
  }
  queue_.push_back(cmd);
}

std::optional<int> GuidedSession::active_seeker() const {
  if (!active_) return std::nullopt;
  return interventions_[*active_].seeker_id;
}

void GuidedSession::end_active(InterventionState state) {
  if (!active_) return;
  Intervention& iv = interventions_[*active_];
  iv.state = state;
  iv.end_tick = world().tick;
  active_.reset();
}

void GuidedSession::apply(const GuidanceCommand& cmd) {
  using T = GuidanceCommand::Type;
  switch (cmd.type) {
    case T::Select: selected_ = cmd.id; break;
    case T::Waypoint:
      end_active(InterventionState::Overridden);
      interventions_.push_back({*selected_, cmd.point, world().tick, InterventionState::Active, std::nullopt});
      active_ = interventions_.size() - 1;
      break;
    case T::Release:
      if (active_seeker() == cmd.id) end_active(InterventionState::Released);
      break;
    case T::Pause: paused_ = true; break;
    case T::Resume: paused_ = false; break;
  }
}

Termination GuidedSession::advance() {
  if (finished()) return check_termination(world());
  std::deque<GuidanceCommand> pending;
  {
    std::lock_guard lock(mutex_);
    pending.swap(queue_);
  }

  // Arrival ends an intervention; so does an exhausted path, which happens
  // when the clicked point lies inside an obstacle and the seeker stops at
  // the nearest free cell instead.
  if (active_) {
    const Intervention& iv = interventions_[*active_];
    const AgentState& s = world().agent(iv.seeker_id);
    const bool own_path = s.waypoint && s.waypoint->position == iv.waypoint;
    if (iv.issue_tick < world().tick &&
        (distance(s.position, iv.waypoint) <= arrive_radius_ || (own_path && s.path_index >= s.path.size())))
      end_active(InterventionState::Completed);
  }
  for (const GuidanceCommand& cmd : pending) apply(cmd);
  if (paused_) return Termination::Ongoing;

  std::map<int, Waypoint> overrides;
  if (active_) {
    const Intervention& iv = interventions_[*active_];
    overrides[iv.seeker_id] = {iv.waypoint, std::nullopt};
  }
  human_log_.push_back(active_seeker());
  return runner_.advance(overrides);
}

json GuidedSession::map_message() const {
  json obstacles = json::array();
  for (const Obstacle& o : world().obstacles) {
    json boxes = json::array();
    for (const OrientedBox& b : o.boxes())
      boxes.push_back({{"x", b.center.x}, {"y", b.center.y}, {"yaw", b.yaw}, {"hx", b.half.x}, {"hy", b.half.y}});
    json j = {{"shape", to_string(o.shape())}, {"x", o.center().x}, {"y", o.center().y},
              {"yaw", o.yaw()}, {"size", o.size_params()}, {"boxes", boxes}};
    if (o.circle()) j["radius"] = o.circle()->radius;
    obstacles.push_back(j);
  }
  return {{"type", "map"}, {"arena_side", arena_side_}, {"obstacles", obstacles}};
}

json GuidedSession::state_message() const {
  const WorldState& w = world();
  json agents = json::array();
  for (const AgentState& a : w.agents)
    agents.push_back({{"id", a.id}, {"role", a.is_seeker() ? "seeker" : "hider"}, {"x", a.position.x},
                      {"y", a.position.y}, {"o", a.orientation}, {"alive", a.alive}});
  json ivs = json::array();
  for (const Intervention& iv : interventions_)
    ivs.push_back({{"seeker_id", iv.seeker_id}, {"x", iv.waypoint.x}, {"y", iv.waypoint.y},
                   {"issue_tick", iv.issue_tick}, {"state", to_string(iv.state)},
                   {"end_tick", iv.end_tick ? json(*iv.end_tick) : json(nullptr)}});
  json msg = {{"type", "state"},
              {"tick", w.tick},
              {"agents", agents},
              {"selected", selected_ ? json(*selected_) : json(nullptr)},
              {"interventions", ivs},
              {"time_left", std::max(0.0, w.config.max_time - w.time())},
              {"paused", paused_},
              {"finished", finished()}};
  if (finished()) msg["outcome"] = to_string(result().outcome);
  return msg;
}

std::optional<Vec2> intercept_point(Vec2 pursuer, double speed, Vec2 target, Vec2 velocity) {
  const Vec2 r = target - pursuer;
  const double a = norm_sq(velocity) - speed * speed;
  const double b = 2.0 * dot(r, velocity);
  const double c = norm_sq(r);
  double t = -1.0;
  if (c == 0.0) {
    t = 0.0;
  } else if (std::abs(a) < 1e-12) {
    if (b < 0.0) t = -c / b;
  } else {
    const double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) return std::nullopt;
    const double s = std::sqrt(disc);
    const double t1 = (-b - s) / (2.0 * a), t2 = (-b + s) / (2.0 * a);
    const double lo = std::min(t1, t2), hi = std::max(t1, t2);
    t = lo > 0.0 ? lo : hi;
  }
  if (t < 0.0) return std::nullopt;
  return target + velocity * t;
}

namespace {

double ray_distance(Vec2 origin, Vec2 dir, Vec2 p) {
  const double t = std::max(0.0, dot(p - origin, dir));
  return distance(origin + dir * t, p);
}

}  // namespace

std::vector<GuidanceCommand> ScriptedIntervener::decide(const GuidedSession& session) {
  const WorldState& w = session.world();
  if (session.finished() || w.config.n_seekers < 2 || used_ >= budget_) return {};
  if (last_time_ && w.time() - *last_time_ < min_interval_) return {};

  double best_t = std::numeric_limits<double>::infinity();
  int best_seeker = -1;
  Vec2 best_point;
  for (const AgentState& h : w.agents) {
    if (!h.is_hider() || !h.alive || norm(h.velocity) < 1e-9) continue;
    const Vec2 dir = h.velocity * (1.0 / norm(h.velocity));
    const AgentState* nearest = nullptr;
    double nearest_d = std::numeric_limits<double>::infinity();
    for (const AgentState& s : w.agents) {
      if (!s.is_seeker()) continue;
      const double d = ray_distance(h.position, dir, s.position);
      if (d < nearest_d) {
        nearest_d = d;
        nearest = &s;
      }
    }
    auto p = intercept_point(nearest->position, nearest->speed, h.position, h.velocity);
    if (!p) continue;
    p->x = std::clamp(p->x, 0.0, w.config.arena_side);
    p->y = std::clamp(p->y, 0.0, w.config.arena_side);
    const double t = distance(nearest->position, *p) / nearest->speed;
    if (t < best_t) {
      best_t = t;
      best_seeker = nearest->id;
      best_point = *p;
    }
  }
  if (best_seeker < 0) return {};
  ++used_;
  last_time_ = w.time();
  return {GuidanceCommand::select(best_seeker), GuidanceCommand::waypoint(best_point)};
}

}  // namespace hs
