#include "hideseek/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "hideseek/png_io.hpp"

namespace hs {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

std::string_view to_string(ControlSource s) { return s == ControlSource::Human ? "human" : "heuristic"; }

ControlSource control_source_from_string(std::string_view s) {
  if (s == "human") return ControlSource::Human;
  if (s == "heuristic") return ControlSource::Heuristic;
  throw DatasetError("unknown control source '" + std::string(s) + "'");
}

int EpisodeLog::n_decisions() const {
  return n_seekers() > 0 ? static_cast<int>(steps.size()) / n_seekers() : 0;
}

bool EpisodeLog::has_human_steps() const {
  return std::any_of(steps.begin(), steps.end(),
                     [](const StepRecord& s) { return s.control_source == ControlSource::Human; });
}

bool EpisodeLog::operator==(const EpisodeLog& o) const {
  return episode_id == o.episode_id && to_config_text(config) == to_config_text(o.config) &&
         seed == o.seed && obstacles == o.obstacles && outcome == o.outcome && duration == o.duration &&
         steps == o.steps && frames == o.frames;
}

std::vector<Setting> Manifest::settings() const {
  std::vector<Setting> out;
  for (const auto& e : episodes)
    if (std::find(out.begin(), out.end(), e.setting) == out.end()) out.push_back(e.setting);
  return out;
}

std::int64_t Manifest::total_samples() const {
  std::int64_t n = 0;
  for (const auto& e : episodes) n += e.samples;
  return n;
}

namespace {

fs::path episode_dir(const fs::path& root, const std::string& id) { return root / ("ep_" + id); }

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw DatasetError("cannot write " + path.string());
}

json read_json(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetError("missing " + path.string());
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw DatasetError("malformed or truncated " + path.string());
  return j;
}

template <class T>
T field(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw DatasetError(where + ": missing field '" + key + "'");
  try {
    return j[key].get<T>();
  } catch (const json::exception&) {
    throw DatasetError(where + ": field '" + key + "' has the wrong type");
  }
}

ojson step_to_json(const StepRecord& s) {
  ojson wp;
  wp["x"] = s.issued_waypoint.position.x;
  wp["y"] = s.issued_waypoint.position.y;
  wp["o"] = s.issued_waypoint.orientation ? ojson(*s.issued_waypoint.orientation) : ojson(nullptr);
  ojson j;
  j["episode_id"] = s.episode_id;
  j["tick"] = s.tick;
  j["agent_id"] = s.agent_id;
  j["obs_ref"] = s.obs_ref;
  j["x"] = s.position.x;
  j["y"] = s.position.y;
  j["o"] = s.orientation;
  j["waypoint"] = wp;
  j["control_source"] = to_string(s.control_source);
  j["setting"] = s.setting.str();
  return j;
}

StepRecord step_from_json(const json& j, const std::string& where) {
  StepRecord s;
  s.episode_id = field<std::string>(j, "episode_id", where);
  s.tick = field<std::int64_t>(j, "tick", where);
  s.agent_id = field<int>(j, "agent_id", where);
  s.obs_ref = field<std::string>(j, "obs_ref", where);
  s.position = {field<double>(j, "x", where), field<double>(j, "y", where)};
  s.orientation = field<double>(j, "o", where);
  const json wp = field<json>(j, "waypoint", where);
  s.issued_waypoint.position = {field<double>(wp, "x", where), field<double>(wp, "y", where)};
  if (wp.contains("o") && !wp["o"].is_null()) s.issued_waypoint.orientation = field<double>(wp, "o", where);
  s.control_source = control_source_from_string(field<std::string>(j, "control_source", where));
  try {
    s.setting = Setting::parse(field<std::string>(j, "setting", where));
  } catch (const ConfigError& e) {
    throw DatasetError(where + ": " + e.what());
  }
  return s;
}

ojson obstacle_to_json(const Obstacle& o) {
  ojson j;
  j["shape"] = to_string(o.shape());
  j["x"] = o.center().x;
  j["y"] = o.center().y;
  j["yaw"] = o.yaw();
  j["size"] = o.size_params();
  return j;
}

Obstacle obstacle_from_json(const json& j) {
  return {shape_from_string(field<std::string>(j, "shape", "obstacle")),
          {field<double>(j, "x", "obstacle"), field<double>(j, "y", "obstacle")},
          field<double>(j, "yaw", "obstacle"),
          field<std::vector<double>>(j, "size", "obstacle")};
}

void write_frame(const fs::path& stem, const Observation& obs) {
  constexpr int N = Observation::kSize;
  Image rgb{N, N, 3, std::vector<std::uint8_t>(std::size_t(N) * N * 3)};
  Image mask{N, N, 1, std::vector<std::uint8_t>(std::size_t(N) * N)};
  for (std::size_t i = 0; i < std::size_t(N) * N; ++i) {
    for (int c = 0; c < 3; ++c) rgb.pixels[i * 3 + c] = obs.data[i * 4 + c];
    mask.pixels[i] = obs.data[i * 4 + 3];
  }
  write_png(stem.string() + "_rgb.png", rgb);
  write_png(stem.string() + "_mask.png", mask);
}

Observation read_frame(const fs::path& stem) {
  constexpr int N = Observation::kSize;
  const Image rgb = read_png(stem.string() + "_rgb.png");
  const Image mask = read_png(stem.string() + "_mask.png");
  if (rgb.width != N || rgb.height != N || rgb.channels != 3 || mask.width != N || mask.height != N ||
      mask.channels != 1)
    throw ImageError("frame has unexpected dimensions");
  Observation obs;
  for (std::size_t i = 0; i < std::size_t(N) * N; ++i) {
    for (int c = 0; c < 3; ++c) obs.data[i * 4 + c] = rgb.pixels[i * 3 + c];
    obs.data[i * 4 + 3] = mask.pixels[i];
  }
  return obs;
}

ojson manifest_to_json(const Manifest& m) {
  ojson j;
  j["name"] = m.name;
  j["format_version"] = m.format_version;
  std::vector<std::string> settings;
  for (const Setting& s : m.settings()) settings.push_back(s.str());
  j["settings"] = settings;
  j["episode_count"] = m.episode_count();
  j["total_samples"] = m.total_samples();
  j["config"] = m.config_snapshot;
  ojson eps = ojson::array();
  for (const auto& e : m.episodes) {
    ojson ej;
    ej["id"] = e.episode_id;
    ej["setting"] = e.setting.str();
    ej["samples"] = e.samples;
    eps.push_back(ej);
  }
  j["episodes"] = eps;
  return j;
}

}  // namespace

Manifest read_manifest(const fs::path& root) {
  const json j = read_json(root / "manifest.json");
  Manifest m;
  m.format_version = field<int>(j, "format_version", "manifest");
  if (m.format_version != kDatasetFormatVersion)
    throw DatasetError("dataset format version " + std::to_string(m.format_version) +
                       " is not supported (expected " + std::to_string(kDatasetFormatVersion) + ")");
  m.name = field<std::string>(j, "name", "manifest");
  m.config_snapshot = field<std::string>(j, "config", "manifest");
  for (const json& e : field<json>(j, "episodes", "manifest"))
    m.episodes.push_back({field<std::string>(e, "id", "manifest"),
                          Setting::parse(field<std::string>(e, "setting", "manifest")),
                          field<int>(e, "samples", "manifest")});
  if (field<int>(j, "episode_count", "manifest") != m.episode_count() ||
      field<std::int64_t>(j, "total_samples", "manifest") != m.total_samples())
    throw DatasetError("manifest counts disagree with its episode list");
  return m;
}

ManifestEntry write_episode(const EpisodeLog& log, const fs::path& root, const std::string& dataset_name) {
  if (log.steps.size() != log.frames.size())
    throw DatasetError("episode " + log.episode_id + " has " + std::to_string(log.steps.size()) +
                       " steps but " + std::to_string(log.frames.size()) + " frames");
  if (log.n_seekers() < 1 || log.steps.size() % log.n_seekers() != 0)
    throw DatasetError("episode " + log.episode_id + " is incomplete: steps are not whole decisions");
  const fs::path dir = episode_dir(root, log.episode_id);
  fs::create_directories(dir / "frames");

  ojson meta;
  meta["format_version"] = kDatasetFormatVersion;
  meta["episode_id"] = log.episode_id;
  meta["seed"] = log.seed;
  meta["setting"] = log.setting().str();
  meta["outcome"] = log.outcome;
  meta["duration"] = log.duration;
  meta["n_decisions"] = log.n_decisions();
  meta["n_steps"] = log.steps.size();
  meta["frame_size"] = Observation::kSize;
  meta["frame_files"] = {"<obs_ref>_rgb.png", "<obs_ref>_mask.png"};
  ojson obstacles = ojson::array();
  for (const Obstacle& o : log.obstacles) obstacles.push_back(obstacle_to_json(o));
  meta["obstacles"] = obstacles;
  meta["config"] = to_config_text(log.config);
  write_text(dir / "meta.json", meta.dump(2) + "\n");

  std::string lines;
  for (std::size_t i = 0; i < log.steps.size(); ++i) {
    lines += step_to_json(log.steps[i]).dump() + "\n";
    write_frame(dir / log.steps[i].obs_ref, log.frames[i]);
  }
  write_text(dir / "steps.jsonl", lines);

  Manifest m;
  if (fs::exists(root / "manifest.json")) m = read_manifest(root);
  else m.config_snapshot = to_config_text(log.config);
  m.name = dataset_name;
  const ManifestEntry entry{log.episode_id, log.setting(), static_cast<int>(log.steps.size())};
  auto it = std::find_if(m.episodes.begin(), m.episodes.end(),
                         [&](const ManifestEntry& e) { return e.episode_id == log.episode_id; });
  if (it != m.episodes.end()) *it = entry;
  else m.episodes.push_back(entry);
  write_text(root / "manifest.json", manifest_to_json(m).dump(2) + "\n");
  return entry;
}

EpisodeLog read_episode(const fs::path& root, const std::string& episode_id) {
  const fs::path dir = episode_dir(root, episode_id);
  const json meta = read_json(dir / "meta.json");
  const int version = field<int>(meta, "format_version", "meta.json");
  if (version != kDatasetFormatVersion)
    throw DatasetError("episode " + episode_id + " has format version " + std::to_string(version) +
                       " (expected " + std::to_string(kDatasetFormatVersion) + ")");
  EpisodeLog log;
  log.episode_id = field<std::string>(meta, "episode_id", "meta.json");
  log.seed = field<std::uint64_t>(meta, "seed", "meta.json");
  log.outcome = field<std::string>(meta, "outcome", "meta.json");
  log.duration = field<double>(meta, "duration", "meta.json");
  for (const json& o : field<json>(meta, "obstacles", "meta.json")) log.obstacles.push_back(obstacle_from_json(o));
  std::istringstream config_text(field<std::string>(meta, "config", "meta.json"));
  log.config = parse_config(config_text);
  const auto n_steps = field<std::size_t>(meta, "n_steps", "meta.json");

  std::ifstream in(dir / "steps.jsonl", std::ios::binary);
  if (!in) throw DatasetError("missing " + (dir / "steps.jsonl").string());
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = "steps.jsonl line " + std::to_string(line_no);
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) throw DatasetError(where + " is malformed or truncated");
    log.steps.push_back(step_from_json(j, where));
  }
  if (log.steps.size() != n_steps)
    throw DatasetError("episode " + episode_id + " is truncated: " + std::to_string(log.steps.size()) +
                       " of " + std::to_string(n_steps) + " steps present");
  for (const StepRecord& s : log.steps) {
    try {
      log.frames.push_back(read_frame(dir / s.obs_ref));
    } catch (const ImageError& e) {
      throw DatasetError("frame of step tick=" + std::to_string(s.tick) + " agent=" +
                         std::to_string(s.agent_id) + " (" + s.obs_ref + ") is unreadable: " + e.what());
    }
  }
  return log;
}

void verify_dataset(const fs::path& root) {
  const Manifest m = read_manifest(root);
  for (const ManifestEntry& e : m.episodes) {
    const fs::path dir = episode_dir(root, e.episode_id);
    const json meta = read_json(dir / "meta.json");
    const auto n_steps = field<std::int64_t>(meta, "n_steps", "meta.json");
    std::ifstream in(dir / "steps.jsonl", std::ios::binary);
    std::int64_t lines = 0;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      ++lines;
      if (!json::accept(line))
        throw DatasetError("episode " + e.episode_id + ": steps.jsonl line " + std::to_string(lines) +
                           " is malformed or truncated");
    }
    if (n_steps != e.samples || lines != e.samples)
      throw DatasetError("episode " + e.episode_id + ": manifest lists " + std::to_string(e.samples) +
                         " samples, meta " + std::to_string(n_steps) + ", steps file " + std::to_string(lines));
  }
}

std::vector<int> teammate_order(Vec2 ref, const std::vector<std::pair<int, Vec2>>& teammates) {
  std::vector<std::pair<double, int>> keyed;
  for (const auto& [id, p] : teammates) keyed.emplace_back(distance(ref, p), id);
  std::sort(keyed.begin(), keyed.end());
  std::vector<int> out;
  for (const auto& [d, id] : keyed) out.push_back(id);
  return out;
}

namespace {

std::vector<std::size_t> frame_window(const EpisodeLog& log, int seeker, int decision, int n) {
  std::vector<std::size_t> out;
  for (int k = decision - n + 1; k <= decision; ++k) out.push_back(log.step_index(std::max(k, 0), seeker));
  return out;
}

Action pose_label(const StepRecord& s, double arena_side) {
  return encode_action(s.position, s.orientation, arena_side);
}

}  // namespace

TrainingSample make_team_sample(const EpisodeLog& log, int seeker_id, int decision, int horizon,
                                int frame_stack_n) {
  if (horizon < 1) throw DatasetError("horizon must be at least 1 decision step");
  if (decision + horizon >= log.n_decisions())
    throw DatasetError("decision " + std::to_string(decision) + " + horizon " + std::to_string(horizon) +
                       " is past the end of episode " + log.episode_id);
  const double side = log.config.world.arena_side;
  const StepRecord& now = log.step(decision, seeker_id);
  TrainingSample s;
  s.episode_id = log.episode_id;
  s.agent_id = seeker_id;
  s.decision = decision;
  s.tick = now.tick;
  s.horizon = horizon;
  s.frame_steps = frame_window(log, seeker_id, decision, frame_stack_n);
  s.self_label = pose_label(log.step(decision + horizon, seeker_id), side);
  s.source = now.control_source;

  std::vector<std::pair<int, Vec2>> mates;
  for (int k = 0; k < log.n_seekers(); ++k)
    if (k != seeker_id) mates.emplace_back(k, log.step(decision, k).position);
  const auto order = teammate_order(now.position, mates);
  for (std::size_t slot = 0; slot < order.size() && slot < 3; ++slot) {
    s.team_ids[slot] = order[slot];
    s.team_labels[slot] = pose_label(log.step(decision + horizon, order[slot]), side);
    s.presence[slot + 1] = true;
  }
  for (std::size_t slot = order.size(); slot < 3; ++slot) s.team_labels[slot] = Action{0, 0, 0, 0};
  return s;
}

std::vector<TrainingSample> make_pairs(const EpisodeLog& log, int horizon, int frame_stack_n) {
  if (horizon < 1) throw DatasetError("horizon must be at least 1 decision step");
  std::vector<TrainingSample> out;
  const int d_max = log.n_decisions() - horizon;
  for (int s = 0; s < log.n_seekers(); ++s)
    for (int d = 0; d < d_max; ++d) out.push_back(make_team_sample(log, s, d, horizon, frame_stack_n));
  return out;
}

std::vector<std::uint8_t> materialize(const EpisodeLog& log, const TrainingSample& sample) {
  std::vector<std::uint8_t> out;
  out.reserve(sample.frame_steps.size() * Observation::kBytes);
  for (std::size_t i : sample.frame_steps) {
    const auto& f = log.frames.at(i).data;
    out.insert(out.end(), f.begin(), f.end());
  }
  return out;
}

void classify_sources(std::vector<TrainingSample>& samples, const std::vector<EpisodeLog>& logs,
                      SourceGranularity mode) {
  std::set<std::string> human_episodes;
  for (const EpisodeLog& log : logs)
    if (log.has_human_steps()) human_episodes.insert(log.episode_id);
  std::map<std::string, const EpisodeLog*> by_id;
  for (const EpisodeLog& log : logs) by_id[log.episode_id] = &log;
  for (TrainingSample& s : samples) {
    if (mode == SourceGranularity::PerEpisode) {
      s.source = human_episodes.count(s.episode_id) ? ControlSource::Human : ControlSource::Heuristic;
    } else if (auto it = by_id.find(s.episode_id); it != by_id.end()) {
      s.source = it->second->step(s.decision, s.agent_id).control_source;
    }
  }
}

std::vector<std::size_t> sample_balanced_batch(const std::vector<TrainingSample>& samples, int batch_size,
                                               Rng& rng) {
  if (batch_size < 2 || batch_size % 2 != 0)
    throw DatasetError("balanced batch size must be a positive even number, got " + std::to_string(batch_size));
  std::vector<std::size_t> human, heuristic;
  for (std::size_t i = 0; i < samples.size(); ++i)
    (samples[i].source == ControlSource::Human ? human : heuristic).push_back(i);
  if (human.empty() || heuristic.empty())
    throw DatasetError(std::string("no ") + (human.empty() ? "Human" : "Heuristic") +
                       " samples to balance against; use plain uniform sampling instead");
  std::vector<std::size_t> out;
  out.reserve(batch_size);
  for (int k = 0; k < batch_size / 2; ++k) out.push_back(human[rng.index(human.size())]);
  for (int k = 0; k < batch_size / 2; ++k) out.push_back(heuristic[rng.index(heuristic.size())]);
  return out;
}

}  // namespace hs
