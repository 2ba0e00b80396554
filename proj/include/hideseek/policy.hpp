#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hideseek/bridge.hpp"
#include "hideseek/config.hpp"
#include "hideseek/heuristics.hpp"
#include "hideseek/observation.hpp"

namespace hs {

enum class PolicyKind { HeuristicSeeker, HeuristicHider, Remote };

struct PolicyBinding {
  int agent_id = 0;
  PolicyKind kind = PolicyKind::HeuristicSeeker;
  std::optional<Endpoint> endpoint;  // Remote only
  int frame_stack_n = 5;

  /// "heuristic" for builtin seekers, "hider" for hiders, else the served
  /// policy name.
  std::string name() const;
  bool operator==(const PolicyBinding&) const = default;
};

/// Policy name -> served endpoint.
using EndpointRegistry = std::map<std::string, Endpoint>;

class BindingError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Parses a team spec such as "il-long:2,pe-t:1" or "heuristic:3" into one
/// binding per agent in id order: seekers in spec order, then the heuristic
/// hiders. "heuristic" is builtin; every other name must be in `registry`.
std::vector<PolicyBinding> bind_team(Setting setting, std::string_view spec,
                                     const EndpointRegistry& registry = {}, int frame_stack_n = 5);

/// Rebinds one seeker from an assignment such as "seeker1=il-long".
void bind_seeker(std::vector<PolicyBinding>& bindings, std::string_view assignment,
                 const EndpointRegistry& registry = {}, int frame_stack_n = 5);

/// All-heuristic bindings for a setting.
std::vector<PolicyBinding> default_bindings(Setting setting);

/// Throws BindingError unless there is exactly one binding per agent in id
/// order and hiders use the heuristic.
void validate_bindings(const std::vector<PolicyBinding>& bindings, Setting setting);

/// Compact label for reports, e.g. "il-long:2+pe-t:1".
std::string combination_label(const std::vector<PolicyBinding>& bindings);

struct DecisionContext {
  const WorldState& world;
  const AgentState& self;
  const SeenGrid& seen;
  const FrameStack* frames;  // set when the policy needs rendered frames
};

class SeekerPolicy {
 public:
  virtual ~SeekerPolicy() = default;
  virtual Waypoint decide(const DecisionContext& ctx) = 0;
  virtual bool needs_frames() const { return false; }
  virtual int frame_stack_n() const { return 0; }
};

class HeuristicSeekerPolicy : public SeekerPolicy {
 public:
  HeuristicSeekerPolicy(std::uint64_t seed, HeuristicParams params) : rng_(seed), params_(params) {}
  Waypoint decide(const DecisionContext& ctx) override;

 private:
  Rng rng_;
  HeuristicParams params_;
  SeekerMemory memory_;
};

/// Queries a served policy over the bridge with the stacked frames.
class RemoteSeekerPolicy : public SeekerPolicy {
 public:
  RemoteSeekerPolicy(Endpoint endpoint, int frame_stack_n, std::chrono::milliseconds deadline);
  Waypoint decide(const DecisionContext& ctx) override;
  bool needs_frames() const override { return true; }
  int frame_stack_n() const override { return n_; }

 private:
  BridgeClient client_;
  int n_;
};

struct PolicyContext {
  std::uint64_t episode_seed = 0;
  HeuristicParams params;
  std::chrono::milliseconds deadline{100};
};

/// Builds the seeker policy for a binding. Tests and tools may substitute
/// their own factory to run in-process policies.
using PolicyFactory =
    std::function<std::unique_ptr<SeekerPolicy>(const PolicyBinding&, const PolicyContext&)>;

std::unique_ptr<SeekerPolicy> make_seeker_policy(const PolicyBinding& binding, const PolicyContext& ctx);

}  // namespace hs
