#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hideseek/episode.hpp"

namespace hs {

struct EvalOptions {
  int n_seeds = 3;
  int episodes_per_seed = 150;
  std::uint64_t base_seed = 0;
  int threads = 1;
  bool mask_teammates = false;
  std::chrono::milliseconds deadline{100};
  PolicyFactory factory;
  double max_aborted_fraction = 0.05;
};

/// Seed s of a sweep and episode e of that seed. Rows evaluated with the
/// same base seed therefore share maps and spawns episode by episode.
std::uint64_t sweep_seed(std::uint64_t base_seed, int seed_index);
std::uint64_t episode_seed(std::uint64_t seed, int episode);

struct EpisodeRecord {
  int seed_index = 0;
  int episode = 0;
  std::uint64_t seed = 0;
  Outcome outcome = Outcome::Timeout;
  double duration = 0.0;
  int caught = 0;
  std::uint64_t trajectory_hash = 0;
  std::string error;
};

struct SeedResult {
  std::uint64_t seed = 0;
  int episodes = 0;
  int successes = 0;
  int timeouts = 0;
  int aborted = 0;
  /// Percent of non-aborted episodes that ended in Success.
  double rate() const;
};

struct SuccessReport {
  std::string setting;
  std::string combination;
  std::vector<std::string> policy_names;
  std::string config_hash;
  bool mask_teammates = false;
  std::vector<SeedResult> seeds;
  double mean = 0.0;  // percent
  double std = 0.0;   // sample std across seeds, percent
  int aborted = 0;
  int episodes = 0;
  bool unreliable = false;
  std::vector<EpisodeRecord> records;  // ordered by (seed_index, episode)
};

/// Runs n_seeds x episodes_per_seed episodes on a pool of `threads`
/// workers. Results are stored by index, so the report does not depend on
/// the number of workers or the order in which episodes finish.
SuccessReport run_eval(const SimConfig& config, const std::vector<PolicyBinding>& bindings,
                       const EvalOptions& options);

/// Mean and sample standard deviation (0 for a single value).
std::pair<double, double> mean_std(const std::vector<double>& values);

/// FNV-1a of the config text, as 16 hex digits.
std::string config_hash(const SimConfig& config);

/// Writes report.csv, report.md and episodes.jsonl into `dir`.
void emit_report(const std::vector<SuccessReport>& reports, const std::filesystem::path& dir);

class ReportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ReportRow {
  std::string setting;
  std::string combination;
  std::string policies;
  bool mask_teammates = false;
  int seeds = 0;
  int episodes = 0;
  int aborted = 0;
  double mean = 0.0;
  double std = 0.0;
  bool unreliable = false;
  std::string config_hash;
  bool operator==(const ReportRow&) const = default;
};

/// Parses report.csv, validating the header and every field.
std::vector<ReportRow> load_report_rows(const std::filesystem::path& csv);

}  // namespace hs
