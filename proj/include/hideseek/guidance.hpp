#pragma once

#include <deque>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hideseek/episode.hpp"

namespace hs {

class CommandError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class InterventionState { Active, Completed, Overridden, Released };
std::string_view to_string(InterventionState s);

/// A human waypoint overriding one seeker's policy. Governs the decisions
/// at ticks [issue_tick, end_tick).
struct Intervention {
  int seeker_id = 0;
  Vec2 waypoint;
  std::int64_t issue_tick = 0;
  InterventionState state = InterventionState::Active;
  std::optional<std::int64_t> end_tick;
};

struct GuidanceCommand {
  enum class Type { Select, Waypoint, Release, Pause, Resume };
  Type type = Type::Select;
  int id = -1;  // Select / Release
  Vec2 point;   // Waypoint

  static GuidanceCommand select(int id) { return {Type::Select, id, {}}; }
  static GuidanceCommand waypoint(Vec2 p) { return {Type::Waypoint, -1, p}; }
  static GuidanceCommand release(int id) { return {Type::Release, id, {}}; }
  static GuidanceCommand pause() { return {Type::Pause, -1, {}}; }
  static GuidanceCommand resume() { return {Type::Resume, -1, {}}; }

  /// Parses a client message; throws CommandError on malformed input.
  static GuidanceCommand from_json(const nlohmann::json& j);
};

/// One guided episode. Commands may be submitted from any thread; they are
/// validated immediately against the selection as it will stand after the
/// queue drains, and take effect at the next decision boundary. At most one
/// intervention is Active at a time: a new waypoint marks the previous one
/// Overridden, whichever seeker it belonged to.
class GuidedSession {
 public:
  GuidedSession(const SimConfig& config, std::vector<PolicyBinding> bindings, std::uint64_t seed,
                EpisodeOptions options = {});

  void submit(const GuidanceCommand& cmd);

  /// Drains commands, expires interventions, then runs one decision unless
  /// paused.
  Termination advance();
  bool finished() const { return runner_.finished(); }
  bool paused() const { return paused_; }

  std::optional<int> selected() const { return selected_; }
  std::optional<int> active_seeker() const;
  const std::vector<Intervention>& interventions() const { return interventions_; }
  /// Seeker governed by a human at each decision so far (nullopt: none).
  const std::vector<std::optional<int>>& human_log() const { return human_log_; }

  const EpisodeRunner& runner() const { return runner_; }
  const WorldState& world() const { return runner_.world(); }
  EpisodeResult result() const { return runner_.result(); }
  EpisodeLog take_log() { return runner_.take_log(); }

  nlohmann::json map_message() const;
  nlohmann::json state_message() const;

 private:
  void apply(const GuidanceCommand& cmd);
  void end_active(InterventionState state);

  EpisodeRunner runner_;
  int n_seekers_;
  double arena_side_;
  double arrive_radius_;

  std::mutex mutex_;
  std::deque<GuidanceCommand> queue_;
  std::optional<int> shadow_selected_;

  std::optional<int> selected_;
  bool paused_ = false;
  std::vector<Intervention> interventions_;
  std::optional<std::size_t> active_;
  std::vector<std::optional<int>> human_log_;
};

/// Closed-form constant-bearing intercept: earliest point where a pursuer at
/// `pursuer` moving at `speed` can meet a target at `target` moving with
/// constant `velocity`. nullopt when no intercept exists.
std::optional<Vec2> intercept_point(Vec2 pursuer, double speed, Vec2 target, Vec2 velocity);

/// Ground-truth stand-in for the human operator. For every moving hider the
/// escape corridor is the ray along its current velocity; the seeker nearest
/// that corridor is sent to its constant-bearing intercept point. Among
/// hiders the earliest intercept wins. Acts at most once per `min_interval`
/// seconds and `budget` times per episode, and only with two or more seekers.
class ScriptedIntervener {
 public:
  explicit ScriptedIntervener(int budget, double min_interval = 5.0) : budget_(budget), min_interval_(min_interval) {}

  std::vector<GuidanceCommand> decide(const GuidedSession& session);
  int used() const { return used_; }

 private:
  int budget_;
  double min_interval_;
  int used_ = 0;
  std::optional<double> last_time_;
};

}  // namespace hs
