#include "hideseek/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <thread>

namespace hs {

namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSweepKey = 0x5eed;

const std::vector<std::string> kCsvHeader = {"setting", "combination", "policies", "mask_teammates",
                                             "seeds", "episodes", "aborted", "mean", "std",
                                             "unreliable", "config_hash"};

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
  return out;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

std::uint64_t sweep_seed(std::uint64_t base_seed, int seed_index) {
  return derive_seed(derive_seed(base_seed, kSweepKey), static_cast<std::uint64_t>(seed_index));
}

std::uint64_t episode_seed(std::uint64_t seed, int episode) {
  return derive_seed(seed, static_cast<std::uint64_t>(episode));
}

double SeedResult::rate() const {
  const int valid = episodes - aborted;
  return valid > 0 ? 100.0 * successes / valid : 0.0;
}

std::pair<double, double> mean_std(const std::vector<double>& values) {
  if (values.empty()) return {0.0, 0.0};
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / values.size();
  if (values.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (values.size() - 1))};
}

std::string config_hash(const SimConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : to_config_text(config)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

SuccessReport run_eval(const SimConfig& config, const std::vector<PolicyBinding>& bindings,
                       const EvalOptions& options) {
  validate_bindings(bindings, config.world.setting());
  const int total = options.n_seeds * options.episodes_per_seed;
  std::vector<EpisodeRecord> records(static_cast<std::size_t>(total));
  std::atomic<int> next{0};

  auto worker = [&] {
    for (int i = next++; i < total; i = next++) {
      EpisodeRecord& r = records[static_cast<std::size_t>(i)];
      r.seed_index = i / options.episodes_per_seed;
      r.episode = i % options.episodes_per_seed;
      r.seed = episode_seed(sweep_seed(options.base_seed, r.seed_index), r.episode);
      EpisodeOptions eo;
      eo.render.mask_teammates = options.mask_teammates;
      eo.deadline = options.deadline;
      eo.factory = options.factory;
      EpisodeResult res;
      try {
        res = run_episode(config, bindings, r.seed, nullptr, eo);
      } catch (const PolicyError& e) {
        res.outcome = Outcome::Aborted;
        res.error = e.what();
      }
      r.outcome = res.outcome;
      r.duration = res.duration;
      r.caught = static_cast<int>(std::count_if(res.catch_times.begin(), res.catch_times.end(),
                                                [](const auto& t) { return t.has_value(); }));
      r.trajectory_hash = res.trajectory_hash;
      r.error = res.error;
    }
  };
  const int threads = std::max(1, std::min(options.threads, total));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  SuccessReport report;
  report.setting = config.world.setting().str();
  report.combination = combination_label(bindings);
  for (const PolicyBinding& b : bindings)
    if (b.kind != PolicyKind::HeuristicHider) report.policy_names.push_back(b.name());
  report.config_hash = config_hash(config);
  report.mask_teammates = options.mask_teammates;
  report.seeds.resize(static_cast<std::size_t>(options.n_seeds));
  for (int s = 0; s < options.n_seeds; ++s) report.seeds[s].seed = sweep_seed(options.base_seed, s);
  for (const EpisodeRecord& r : records) {
    SeedResult& s = report.seeds[r.seed_index];
    ++s.episodes;
    if (r.outcome == Outcome::Success) ++s.successes;
    else if (r.outcome == Outcome::Timeout) ++s.timeouts;
    else ++s.aborted;
  }
  std::vector<double> rates;
  for (const SeedResult& s : report.seeds) {
    rates.push_back(s.rate());
    report.aborted += s.aborted;
    report.episodes += s.episodes;
  }
  std::tie(report.mean, report.std) = mean_std(rates);
  report.unreliable = total > 0 && static_cast<double>(report.aborted) / total > options.max_aborted_fraction;
  report.records = std::move(records);
  return report;
}

void emit_report(const std::vector<SuccessReport>& reports, const fs::path& dir) {
  fs::create_directories(dir);
  std::ofstream csv(dir / "report.csv", std::ios::binary);
  csv << join(kCsvHeader, ",") << "\n";
  std::ofstream md(dir / "report.md", std::ios::binary);
  md << "| Setting | Combination | Success rate (%) | Aborted | Episodes | Policies | Config |\n";
  md << "|---|---|---|---|---|---|---|\n";
  std::ofstream jl(dir / "episodes.jsonl", std::ios::binary);

  for (const SuccessReport& r : reports) {
    const std::string policies = join(r.policy_names, ";");
    csv << join({r.setting, r.combination, policies, r.mask_teammates ? "1" : "0",
                 std::to_string(r.seeds.size()), std::to_string(r.episodes), std::to_string(r.aborted),
                 fixed(r.mean, 4), fixed(r.std, 4), r.unreliable ? "1" : "0", r.config_hash},
                ",")
        << "\n";
    std::string combo = r.combination + (r.mask_teammates ? " (teammates masked)" : "");
    md << "| " << r.setting << " | " << combo << " | " << fixed(r.mean, 1) << "±" << fixed(r.std, 1)
       << (r.unreliable ? " (unreliable)" : "") << " | " << r.aborted << " | " << r.episodes << " | "
       << policies << " | " << r.config_hash << " |\n";
    for (const EpisodeRecord& e : r.records) {
      nlohmann::ordered_json j;
      j["setting"] = r.setting;
      j["combination"] = r.combination;
      j["mask_teammates"] = r.mask_teammates;
      j["seed_index"] = e.seed_index;
      j["episode"] = e.episode;
      j["seed"] = e.seed;
      j["outcome"] = to_string(e.outcome);
      j["duration"] = e.duration;
      j["caught"] = e.caught;
      j["trajectory_hash"] = e.trajectory_hash;
      if (!e.error.empty()) j["error"] = e.error;
      jl << j.dump() << "\n";
    }
  }
  md << "\nSuccess rates exclude aborted episodes from the denominator; "
        "± is the sample standard deviation across seeds.\n";
}

std::vector<ReportRow> load_report_rows(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ReportError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || split(line, ',') != kCsvHeader)
    throw ReportError(path.string() + ": unexpected header");
  std::vector<ReportRow> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split(line, ',');
    const std::string where = path.string() + " line " + std::to_string(line_no);
    if (f.size() != kCsvHeader.size())
      throw ReportError(where + ": expected " + std::to_string(kCsvHeader.size()) + " fields, got " +
                        std::to_string(f.size()));
    auto as_int = [&](const std::string& s, const char* name) {
      std::size_t pos = 0;
      int v = 0;
      try {
        v = std::stoi(s, &pos);
      } catch (const std::exception&) {
        pos = 0;
      }
      if (s.empty() || pos != s.size()) throw ReportError(where + ": field '" + name + "' is not an integer");
      return v;
    };
    auto as_double = [&](const std::string& s, const char* name) {
      std::size_t pos = 0;
      double v = 0;
      try {
        v = std::stod(s, &pos);
      } catch (const std::exception&) {
        pos = 0;
      }
      if (s.empty() || pos != s.size()) throw ReportError(where + ": field '" + name + "' is not a number");
      return v;
    };
    auto as_flag = [&](const std::string& s, const char* name) {
      if (s != "0" && s != "1") throw ReportError(where + ": field '" + name + "' must be 0 or 1");
      return s == "1";
    };
    for (std::size_t k : {0u, 1u, 10u})
      if (f[k].empty()) throw ReportError(where + ": field '" + kCsvHeader[k] + "' is empty");
    ReportRow r;
    r.setting = f[0];
    r.combination = f[1];
    r.policies = f[2];
    r.mask_teammates = as_flag(f[3], "mask_teammates");
    r.seeds = as_int(f[4], "seeds");
    r.episodes = as_int(f[5], "episodes");
    r.aborted = as_int(f[6], "aborted");
    r.mean = as_double(f[7], "mean");
    r.std = as_double(f[8], "std");
    r.unreliable = as_flag(f[9], "unreliable");
    r.config_hash = f[10];
    rows.push_back(r);
  }
  return rows;
}

}  // namespace hs
