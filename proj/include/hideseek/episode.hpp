#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hideseek/dataset.hpp"
#include "hideseek/observation.hpp"
#include "hideseek/policy.hpp"
#include "hideseek/world.hpp"

namespace hs {

enum class Outcome { Success, Timeout, Aborted };
std::string_view to_string(Outcome o);
Outcome outcome_from_string(std::string_view s);

struct EpisodeResult {
  Outcome outcome = Outcome::Timeout;
  std::vector<std::optional<double>> catch_times;  // per hider, in hider order
  double duration = 0.0;
  std::uint64_t seed = 0;
  std::int64_t ticks = 0;
  std::uint64_t trajectory_hash = 0;  // hash_state folded over every tick
  std::string error;                  // set when Aborted
};

struct EpisodeOptions {
  RenderOptions render;
  std::chrono::milliseconds deadline{100};
  PolicyFactory factory;  // defaults to make_seeker_policy
  bool record = false;
  std::string episode_id;
};

/// Steps one episode decision by decision. Each advance():
///   1. updates every seeker's seen grid from its current position,
///   2. renders and stacks frames when recording or a policy needs them,
///   3. asks each seeker for a waypoint (a human override replaces the
///      bound policy for that seeker) and each live hider for its move,
///   4. records one StepRecord per seeker,
///   5. runs control_period physics ticks or until the episode ends.
class EpisodeRunner {
 public:
  EpisodeRunner(const SimConfig& config, std::vector<PolicyBinding> bindings, std::uint64_t seed,
                EpisodeOptions options = {});
  ~EpisodeRunner();

  /// `overrides` maps seeker id -> human waypoint for this decision.
  Termination advance(const std::map<int, Waypoint>& overrides = {});
  bool finished() const { return finished_; }

  const WorldState& world() const { return world_; }
  const SeenGrid& seen(int seeker_id) const { return seen_.at(static_cast<std::size_t>(seeker_id)); }
  int decisions() const { return decisions_; }
  std::uint64_t trajectory_hash() const { return hash_; }
  EpisodeResult result() const;
  /// Recorded log (requires options.record); valid once finished.
  EpisodeLog take_log();

 private:
  SimConfig config_;
  std::vector<PolicyBinding> bindings_;
  EpisodeOptions options_;
  WorldState world_;
  std::unique_ptr<ObservationRenderer> renderer_;
  std::vector<std::unique_ptr<SeekerPolicy>> policies_;
  std::vector<SeenGrid> seen_;
  std::vector<FrameStack> frames_;
  std::uint64_t hash_;
  int decisions_ = 0;
  bool finished_ = false;
  bool aborted_ = false;
  std::string error_;
  EpisodeLog log_;
};

/// Runs a whole episode. When `recorder` is given the full log is stored
/// there.
EpisodeResult run_episode(const SimConfig& config, const std::vector<PolicyBinding>& bindings,
                          std::uint64_t seed, EpisodeLog* recorder = nullptr, EpisodeOptions options = {});

}  // namespace hs
