#include "hideseek/policy.hpp"

#include <algorithm>
#include <charconv>

namespace hs {

std::string PolicyBinding::name() const {
  switch (kind) {
    case PolicyKind::HeuristicSeeker: return "heuristic";
    case PolicyKind::HeuristicHider: return "hider";
    case PolicyKind::Remote: return endpoint ? endpoint->policy : "remote";
  }
  return "unknown";
}

std::vector<PolicyBinding> bind_team(Setting setting, std::string_view spec,
                                     const EndpointRegistry& registry, int frame_stack_n) {
  std::vector<PolicyBinding> out;
  std::size_t pos = 0;
  while (pos <= spec.size()) {
    const auto comma = std::min(spec.find(',', pos), spec.size());
    const auto item = spec.substr(pos, comma - pos);
    pos = comma + 1;
    const auto colon = item.rfind(':');
    if (item.empty() || colon == std::string_view::npos || colon == 0)
      throw BindingError("team entry '" + std::string(item) + "' must look like name:count");
    const std::string name(item.substr(0, colon));
    const auto count_text = item.substr(colon + 1);
    int count = 0;
    const auto [ptr, ec] = std::from_chars(count_text.data(), count_text.data() + count_text.size(), count);
    if (ec != std::errc{} || ptr != count_text.data() + count_text.size() || count < 1)
      throw BindingError("bad count in team entry '" + std::string(item) + "'");
    std::optional<Endpoint> endpoint;
    if (name != "heuristic") {
      auto it = registry.find(name);
      if (it == registry.end()) throw BindingError("unknown policy '" + name + "'");
      endpoint = it->second;
    }
    for (int k = 0; k < count; ++k) {
      PolicyBinding b;
      b.agent_id = static_cast<int>(out.size());
      b.kind = endpoint ? PolicyKind::Remote : PolicyKind::HeuristicSeeker;
      b.endpoint = endpoint;
      b.frame_stack_n = frame_stack_n;
      out.push_back(b);
    }
    if (comma == spec.size()) break;
  }
  if (static_cast<int>(out.size()) != setting.n_seekers)
    throw BindingError("team spec '" + std::string(spec) + "' binds " + std::to_string(out.size()) +
                       " seekers but setting " + setting.str() + " has " +
                       std::to_string(setting.n_seekers));
  for (int h = 0; h < setting.n_hiders; ++h)
    out.push_back({setting.n_seekers + h, PolicyKind::HeuristicHider, std::nullopt, frame_stack_n});
  return out;
}

void bind_seeker(std::vector<PolicyBinding>& bindings, std::string_view assignment,
                 const EndpointRegistry& registry, int frame_stack_n) {
  const auto eq = assignment.find('=');
  constexpr std::string_view prefix = "seeker";
  if (eq == std::string_view::npos || !assignment.starts_with(prefix))
    throw BindingError("binding '" + std::string(assignment) + "' must look like seeker<k>=name");
  const auto id_text = assignment.substr(prefix.size(), eq - prefix.size());
  int id = -1;
  const auto [ptr, ec] = std::from_chars(id_text.data(), id_text.data() + id_text.size(), id);
  if (ec != std::errc{} || ptr != id_text.data() + id_text.size() || id < 0 ||
      id >= static_cast<int>(bindings.size()) || bindings[id].kind == PolicyKind::HeuristicHider)
    throw BindingError("no seeker '" + std::string(assignment.substr(0, eq)) + "'");
  const std::string name(assignment.substr(eq + 1));
  PolicyBinding& b = bindings[id];
  b.frame_stack_n = frame_stack_n;
  if (name == "heuristic") {
    b.kind = PolicyKind::HeuristicSeeker;
    b.endpoint.reset();
    return;
  }
  auto it = registry.find(name);
  if (it == registry.end()) throw BindingError("unknown policy '" + name + "'");
  b.kind = PolicyKind::Remote;
  b.endpoint = it->second;
}

std::vector<PolicyBinding> default_bindings(Setting setting) {
  return bind_team(setting, "heuristic:" + std::to_string(setting.n_seekers));
}

void validate_bindings(const std::vector<PolicyBinding>& bindings, Setting setting) {
  const int n = setting.n_seekers + setting.n_hiders;
  if (static_cast<int>(bindings.size()) != n)
    throw BindingError("expected " + std::to_string(n) + " bindings, got " + std::to_string(bindings.size()));
  for (int i = 0; i < n; ++i) {
    const PolicyBinding& b = bindings[i];
    if (b.agent_id != i) throw BindingError("bindings must be in agent id order");
    const bool seeker = i < setting.n_seekers;
    if (!seeker && b.kind != PolicyKind::HeuristicHider)
      throw BindingError("hider " + std::to_string(i) + " must use the hider heuristic");
    if (seeker && b.kind == PolicyKind::HeuristicHider)
      throw BindingError("seeker " + std::to_string(i) + " bound to the hider heuristic");
    if (b.kind == PolicyKind::Remote && (!b.endpoint || b.frame_stack_n < 1))
      throw BindingError("remote binding for agent " + std::to_string(i) + " lacks an endpoint");
  }
}

std::string combination_label(const std::vector<PolicyBinding>& bindings) {
  std::string out;
  std::string last;
  int run = 0;
  auto flush = [&] {
    if (run == 0) return;
    if (!out.empty()) out += "+";
    out += last + ":" + std::to_string(run);
  };
  for (const PolicyBinding& b : bindings) {
    if (b.kind == PolicyKind::HeuristicHider) continue;
    if (b.name() != last) {
      flush();
      last = b.name();
      run = 0;
    }
    ++run;
  }
  flush();
  return out;
}

Waypoint HeuristicSeekerPolicy::decide(const DecisionContext& ctx) {
  const auto hiders = visible_opponents(ctx.world, ctx.self, ctx.world.config.seeker_range);
  return seeker_heuristic(ctx.self, hiders, ctx.seen, *ctx.world.grid, rng_, memory_, params_);
}

RemoteSeekerPolicy::RemoteSeekerPolicy(Endpoint endpoint, int frame_stack_n,
                                       std::chrono::milliseconds deadline)
    : client_(std::move(endpoint), deadline), n_(frame_stack_n) {}

Waypoint RemoteSeekerPolicy::decide(const DecisionContext& ctx) {
  if (!ctx.frames || ctx.frames->capacity() != n_)
    throw ShapeError("remote policy expects a stack of " + std::to_string(n_) + " frames");
  const Action a = client_.query(ctx.self.id, n_, ctx.frames->stacked());
  const double side = ctx.world.config.arena_side;
  Vec2 p = action_position(a, side);
  p.x = std::clamp(p.x, 0.0, side);
  p.y = std::clamp(p.y, 0.0, side);
  return {p, action_orientation(a)};
}

std::unique_ptr<SeekerPolicy> make_seeker_policy(const PolicyBinding& binding, const PolicyContext& ctx) {
  switch (binding.kind) {
    case PolicyKind::HeuristicSeeker:
      return std::make_unique<HeuristicSeekerPolicy>(
          derive_seed(ctx.episode_seed, stream::kPolicyBase + static_cast<std::uint64_t>(binding.agent_id)),
          ctx.params);
    case PolicyKind::Remote:
      return std::make_unique<RemoteSeekerPolicy>(*binding.endpoint, binding.frame_stack_n, ctx.deadline);
    case PolicyKind::HeuristicHider:
      break;
  }
  throw BindingError("agent " + std::to_string(binding.agent_id) + " is not a seeker binding");
}

}  // namespace hs
