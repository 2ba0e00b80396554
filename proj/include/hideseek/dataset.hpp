#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hideseek/action.hpp"
#include "hideseek/config.hpp"
#include "hideseek/observation.hpp"
#include "hideseek/rng.hpp"
#include "hideseek/world.hpp"

namespace hs {

class DatasetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ControlSource { Heuristic, Human };
std::string_view to_string(ControlSource s);
ControlSource control_source_from_string(std::string_view s);

/// One seeker at one decision tick.
struct StepRecord {
  std::string episode_id;
  std::int64_t tick = 0;
  int agent_id = 0;
  std::string obs_ref;  // frame path stem relative to the episode directory
  Vec2 position;
  double orientation = 0.0;
  Waypoint issued_waypoint;
  ControlSource control_source = ControlSource::Heuristic;
  Setting setting;

  bool operator==(const StepRecord&) const = default;
};

/// Every decision tick for every seeker, decision-major then seeker id.
/// `frames[i]` is the observation of `steps[i]`.
struct EpisodeLog {
  std::string episode_id;
  SimConfig config;
  std::uint64_t seed = 0;
  std::vector<Obstacle> obstacles;
  std::string outcome;
  double duration = 0.0;
  std::vector<StepRecord> steps;
  std::vector<Observation> frames;

  Setting setting() const { return config.world.setting(); }
  int n_seekers() const { return config.world.n_seekers; }
  int n_decisions() const;
  /// Step of `seeker` at decision index `d`.
  const StepRecord& step(int d, int seeker) const { return steps[std::size_t(d) * n_seekers() + seeker]; }
  std::size_t step_index(int d, int seeker) const { return std::size_t(d) * n_seekers() + seeker; }
  bool has_human_steps() const;

  bool operator==(const EpisodeLog& o) const;
};

constexpr int kDatasetFormatVersion = 1;

struct ManifestEntry {
  std::string episode_id;
  Setting setting;
  int samples = 0;
  bool operator==(const ManifestEntry&) const = default;
};

struct Manifest {
  std::string name;
  int format_version = kDatasetFormatVersion;
  std::vector<ManifestEntry> episodes;
  std::string config_snapshot;

  std::vector<Setting> settings() const;
  int episode_count() const { return static_cast<int>(episodes.size()); }
  std::int64_t total_samples() const;
};

/// Writes `root/ep_<id>/{meta.json, steps.jsonl, frames/*.png}` and adds the
/// episode to `root/manifest.json` (created on first use).
ManifestEntry write_episode(const EpisodeLog& log, const std::filesystem::path& root,
                            const std::string& dataset_name = "dataset");
/// Throws DatasetError for a version mismatch, truncated files, or a damaged
/// frame (the message names the step).
EpisodeLog read_episode(const std::filesystem::path& root, const std::string& episode_id);
Manifest read_manifest(const std::filesystem::path& root);
/// Checks that every manifest entry exists and that the counts agree with
/// the stored step files.
void verify_dataset(const std::filesystem::path& root);

/// Ids sorted by distance to `ref`, exact ties by ascending id.
std::vector<int> teammate_order(Vec2 ref, const std::vector<std::pair<int, Vec2>>& teammates);

/// Frames are referenced by step index into the log; use materialize() to
/// build the stacked tensor.
struct TrainingSample {
  std::string episode_id;
  int agent_id = 0;
  int decision = 0;
  std::int64_t tick = 0;
  int horizon = 1;
  std::vector<std::size_t> frame_steps;  // oldest first
  Action self_label;
  std::array<Action, 3> team_labels{};
  std::array<int, 3> team_ids{-1, -1, -1};
  std::array<bool, 4> presence{true, false, false, false};
  ControlSource source = ControlSource::Heuristic;
};

/// One sample per (seeker, decision d) with d + h inside the episode; the
/// label is the seeker's pose at decision d + h.
std::vector<TrainingSample> make_pairs(const EpisodeLog& log, int horizon, int frame_stack_n = 5);

/// make_pairs sample plus teammate labels at d + h, slotted by
/// teammate_order at decision d.
TrainingSample make_team_sample(const EpisodeLog& log, int seeker_id, int decision, int horizon,
                                int frame_stack_n = 5);

std::vector<std::uint8_t> materialize(const EpisodeLog& log, const TrainingSample& sample);

enum class SourceGranularity { PerStep, PerEpisode };
/// PerEpisode marks every sample of an episode that contains any Human step
/// as Human.
void classify_sources(std::vector<TrainingSample>& samples, const std::vector<EpisodeLog>& logs,
                      SourceGranularity mode);

/// Exactly batch_size/2 Human and batch_size/2 Heuristic sample indices,
/// uniform with replacement within each class.
std::vector<std::size_t> sample_balanced_batch(const std::vector<TrainingSample>& samples,
                                               int batch_size, Rng& rng);

}  // namespace hs
