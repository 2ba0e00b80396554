#include "hideseek/episode.hpp"

#include <algorithm>

namespace hs {

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::Success: return "success";
    case Outcome::Timeout: return "timeout";
    case Outcome::Aborted: return "aborted";
  }
  return "unknown";
}

Outcome outcome_from_string(std::string_view s) {
  if (s == "success") return Outcome::Success;
  if (s == "timeout") return Outcome::Timeout;
  if (s == "aborted") return Outcome::Aborted;
  throw std::invalid_argument("unknown outcome '" + std::string(s) + "'");
}

EpisodeRunner::EpisodeRunner(const SimConfig& config, std::vector<PolicyBinding> bindings,
                             std::uint64_t seed, EpisodeOptions options)
    : config_(config), bindings_(std::move(bindings)), options_(std::move(options)) {
  validate_bindings(bindings_, config_.world.setting());
  world_ = make_world(config_.world, seed);
  hash_ = hash_state(world_);

  const PolicyContext ctx{seed, config_.heuristics, options_.deadline};
  const int n_seekers = config_.world.n_seekers;
  bool need_render = options_.record;
  for (int s = 0; s < n_seekers; ++s) {
    policies_.push_back(options_.factory ? options_.factory(bindings_[s], ctx)
                                         : make_seeker_policy(bindings_[s], ctx));
    seen_.emplace_back(*world_.grid);
    frames_.emplace_back(std::max(1, policies_.back()->frame_stack_n()));
    need_render = need_render || policies_.back()->needs_frames();
  }
  if (need_render) renderer_ = std::make_unique<ObservationRenderer>(world_);

  if (options_.record) {
    log_.episode_id = options_.episode_id.empty() ? "seed" + std::to_string(seed) : options_.episode_id;
    log_.config = config_;
    log_.config.world.seed = seed;
    log_.seed = seed;
    log_.obstacles = world_.obstacles;
  }
}

EpisodeRunner::~EpisodeRunner() = default;

Termination EpisodeRunner::advance(const std::map<int, Waypoint>& overrides) {
  if (finished_) return check_termination(world_);
  const WorldConfig& wc = config_.world;
  const int n_seekers = wc.n_seekers;

  for (int s = 0; s < n_seekers; ++s)
    update_seen(seen_[s], world_.agents[s].position, world_.obstacles, wc.seeker_range);

  std::vector<Observation> rendered;
  if (renderer_) {
    for (int s = 0; s < n_seekers; ++s) {
      const bool needed = options_.record || policies_[s]->needs_frames();
      rendered.push_back(needed ? renderer_->render(world_, s, seen_[s], options_.render) : Observation{});
      if (policies_[s]->needs_frames()) frames_[s].push(rendered.back());
    }
  }

  CommandMap commands;
  std::vector<ControlSource> sources(n_seekers, ControlSource::Heuristic);
  try {
    for (int s = 0; s < n_seekers; ++s) {
      const AgentState& self = world_.agents[s];
      if (auto it = overrides.find(s); it != overrides.end()) {
        commands[s] = it->second;
        sources[s] = ControlSource::Human;
        continue;
      }
      const DecisionContext ctx{world_, self, seen_[s],
                                policies_[s]->needs_frames() ? &frames_[s] : nullptr};
      commands[s] = policies_[s]->decide(ctx);
    }
  } catch (const PolicyError& e) {
    aborted_ = true;
    finished_ = true;
    error_ = e.what();
    return Termination::Ongoing;
  }
  for (std::size_t i = n_seekers; i < world_.agents.size(); ++i) {
    const AgentState& h = world_.agents[i];
    if (!h.alive) continue;
    const auto seekers = visible_opponents(world_, h, wc.hider_range);
    commands[h.id] = hider_heuristic(h, seekers, *world_.grid, wc, config_.heuristics);
  }

  if (options_.record) {
    for (int s = 0; s < n_seekers; ++s) {
      const AgentState& a = world_.agents[s];
      StepRecord r;
      r.episode_id = log_.episode_id;
      r.tick = world_.tick;
      r.agent_id = s;
      r.obs_ref = "frames/t" + std::to_string(world_.tick) + "_a" + std::to_string(s);
      r.position = a.position;
      r.orientation = a.orientation;
      r.issued_waypoint = commands[s];
      r.control_source = sources[s];
      r.setting = wc.setting();
      log_.steps.push_back(std::move(r));
      log_.frames.push_back(std::move(rendered[s]));
    }
  }

  ++decisions_;
  Termination t = Termination::Ongoing;
  for (int k = 0; k < wc.control_period && t == Termination::Ongoing; ++k) {
    step(world_, k == 0 ? commands : CommandMap{});
    hash_ = hash_state(world_, hash_);
    t = check_termination(world_);
  }
  if (t != Termination::Ongoing) finished_ = true;
  return t;
}

EpisodeResult EpisodeRunner::result() const {
  EpisodeResult r;
  r.seed = world_.seed;
  r.ticks = world_.tick;
  r.duration = world_.time();
  r.trajectory_hash = hash_;
  for (const AgentState& a : world_.agents)
    if (a.is_hider()) r.catch_times.push_back(a.catch_time);
  if (aborted_) {
    r.outcome = Outcome::Aborted;
    r.error = error_;
  } else {
    r.outcome = check_termination(world_) == Termination::Success ? Outcome::Success : Outcome::Timeout;
  }
  return r;
}

EpisodeLog EpisodeRunner::take_log() {
  const EpisodeResult r = result();
  log_.outcome = std::string(to_string(r.outcome));
  log_.duration = r.duration;
  return std::move(log_);
}

EpisodeResult run_episode(const SimConfig& config, const std::vector<PolicyBinding>& bindings,
                          std::uint64_t seed, EpisodeLog* recorder, EpisodeOptions options) {
  if (recorder) options.record = true;
  EpisodeRunner runner(config, bindings, seed, std::move(options));
  while (!runner.finished()) runner.advance();
  if (recorder) *recorder = runner.take_log();
  return runner.result();
}

}  // namespace hs
