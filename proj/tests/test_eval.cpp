#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>
#include <thread>

#include "hideseek/bridge.hpp"
#include "hideseek/clone_policy.hpp"
#include "hideseek/eval.hpp"
#include "hideseek/rng.hpp"

using namespace hs;
using namespace std::chrono_literals;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    path_ = fs::temp_directory_path() / (std::string("hs_") + info->test_suite_name() + "_" + info->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

SimConfig config_for(Setting setting, double max_time) {
  SimConfig c;
  c.world.set_setting(setting);
  c.world.max_time = max_time;
  return c;
}

EvalOptions options(int seeds, int episodes, int threads = 1) {
  EvalOptions o;
  o.n_seeds = seeds;
  o.episodes_per_seed = episodes;
  o.base_seed = 17;
  o.threads = threads;
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

const std::string kHeader =
    "setting,combination,policies,mask_teammates,seeds,episodes,aborted,mean,std,unreliable,config_hash\n";

}  // namespace

TEST(Eval, ParallelismDoesNotChangeTheReport) {
  const SimConfig config = config_for({2, 1}, 40.0);
  const auto bindings = default_bindings({2, 1});
  const SuccessReport one = run_eval(config, bindings, options(3, 6, 1));
  const SuccessReport eight = run_eval(config, bindings, options(3, 6, 8));
  ASSERT_EQ(one.records.size(), 18u);
  ASSERT_EQ(eight.records.size(), 18u);
  for (std::size_t i = 0; i < one.records.size(); ++i) {
    EXPECT_EQ(one.records[i].seed, eight.records[i].seed);
    EXPECT_EQ(one.records[i].trajectory_hash, eight.records[i].trajectory_hash) << "episode " << i;
    EXPECT_EQ(one.records[i].outcome, eight.records[i].outcome);
  }
  TempDir dir;
  emit_report({one}, dir.path() / "a");
  emit_report({eight}, dir.path() / "b");
  for (const char* f : {"report.csv", "report.md", "episodes.jsonl"})
    EXPECT_EQ(slurp(dir.path() / "a" / f), slurp(dir.path() / "b" / f)) << f;
}

TEST(Eval, RecordsAreOrderedAndSeedsAreDerived) {
  const SuccessReport r = run_eval(config_for({1, 1}, 10.0), default_bindings({1, 1}), options(2, 3));
  ASSERT_EQ(r.records.size(), 6u);
  for (int s = 0; s < 2; ++s) {
    EXPECT_EQ(r.seeds[s].seed, sweep_seed(17, s));
    for (int e = 0; e < 3; ++e) {
      const EpisodeRecord& rec = r.records[static_cast<std::size_t>(s * 3 + e)];
      EXPECT_EQ(rec.seed_index, s);
      EXPECT_EQ(rec.episode, e);
      EXPECT_EQ(rec.seed, episode_seed(sweep_seed(17, s), e));
    }
  }
  std::set<std::uint64_t> distinct;
  for (const auto& rec : r.records) distinct.insert(rec.seed);
  EXPECT_EQ(distinct.size(), 6u);
}

TEST(Eval, RowsWithTheSameBaseSeedArePaired) {
  const SimConfig config = config_for({2, 1}, 10.0);
  const auto bindings = default_bindings({2, 1});
  const SuccessReport a = run_eval(config, bindings, options(2, 4));
  EvalOptions masked = options(2, 4);
  masked.mask_teammates = true;
  const SuccessReport b = run_eval(config, bindings, masked);
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    EXPECT_EQ(a.records[i].seed, b.records[i].seed);
    // Builtin seekers never look at the rendered frames.
    EXPECT_EQ(a.records[i].trajectory_hash, b.records[i].trajectory_hash);
  }
  EXPECT_EQ(a.mean, b.mean);
}

TEST(Eval, MeanAndSampleStd) {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = static_cast<int>(rng.uniform_int(1, 8));
    std::vector<double> v;
    for (int i = 0; i < n; ++i) v.push_back(rng.uniform(0.0, 100.0));
    long double sum = 0;
    for (double x : v) sum += x;
    const long double mean = sum / n;
    long double ss = 0;
    for (double x : v) ss += (x - mean) * (x - mean);
    const double sd = n > 1 ? static_cast<double>(std::sqrt(ss / (n - 1))) : 0.0;
    const auto [m, s] = mean_std(v);
    EXPECT_NEAR(m, static_cast<double>(mean), 1e-9);
    EXPECT_NEAR(s, sd, 1e-9);
  }
  const auto [m, s] = mean_std({100.0, 0.0, 100.0});
  EXPECT_NEAR(m, 200.0 / 3.0, 1e-12);
  EXPECT_NEAR(s, std::sqrt(10000.0 / 3.0), 1e-9);
  EXPECT_EQ(mean_std({42.0}), std::make_pair(42.0, 0.0));
}

TEST(Eval, SeedRateExcludesAborted) {
  SeedResult s;
  s.episodes = 10;
  s.successes = 3;
  s.timeouts = 3;
  s.aborted = 4;
  EXPECT_DOUBLE_EQ(s.rate(), 50.0);
  s.aborted = 10;
  s.successes = 0;
  s.timeouts = 0;
  EXPECT_DOUBLE_EQ(s.rate(), 0.0);
}

TEST(Eval, AllTimeoutsGiveZero) {
  SimConfig config = config_for({1, 1}, 1.0);
  const SuccessReport r = run_eval(config, default_bindings({1, 1}), options(3, 2));
  for (const auto& rec : r.records) ASSERT_EQ(rec.outcome, Outcome::Timeout) << rec.seed;
  EXPECT_EQ(r.mean, 0.0);
  EXPECT_EQ(r.std, 0.0);
  EXPECT_FALSE(r.unreliable);
}

TEST(Eval, AbortedEpisodesLeaveTheDenominator) {
  // A few requests stall past the deadline, so those episodes abort and the
  // rest finish normally.
  std::atomic<int> count{0};
  auto echo = echo_handler({0.2, -0.1, 0.0, 1.0});
  PolicyServer server([&](const PolicyRequest& req) {
    const int k = ++count;
    if (k == 10 || k == 200 || k == 600) std::this_thread::sleep_for(300ms);
    return echo(req);
  });
  const SimConfig config = config_for({2, 1}, 30.0);
  const auto bindings = bind_team({2, 1}, "mock:1,heuristic:1", {{"mock", server.endpoint("mock")}});
  EvalOptions o = options(2, 8);
  o.deadline = 100ms;
  const SuccessReport r = run_eval(config, bindings, o);

  int aborted = 0;
  std::vector<double> rates;
  for (int s = 0; s < 2; ++s) {
    int succ = 0, valid = 0;
    for (const auto& rec : r.records) {
      if (rec.seed_index != s) continue;
      if (rec.outcome == Outcome::Aborted) {
        ++aborted;
        EXPECT_FALSE(rec.error.empty());
        continue;
      }
      ++valid;
      if (rec.outcome == Outcome::Success) ++succ;
    }
    rates.push_back(valid ? 100.0 * succ / valid : 0.0);
    EXPECT_EQ(r.seeds[s].episodes, 8);
  }
  ASSERT_GT(aborted, 0);
  ASSERT_LT(aborted, 16);
  EXPECT_EQ(r.aborted, aborted);
  EXPECT_EQ(r.episodes, 16);
  const auto [m, sd] = mean_std(rates);
  EXPECT_DOUBLE_EQ(r.mean, m);
  EXPECT_DOUBLE_EQ(r.std, sd);
  EXPECT_EQ(r.unreliable, aborted / 16.0 > 0.05);

  TempDir dir;
  emit_report({r}, dir.path());
  EXPECT_NE(slurp(dir.path() / "report.md").find("exclude aborted"), std::string::npos);
  const auto rows = load_report_rows(dir.path() / "report.csv");
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].aborted, aborted);
  EXPECT_EQ(rows[0].policies, "mock;heuristic");
}

TEST(Eval, StallingPolicyMarksTheReportUnreliable) {
  PolicyServer server(sleep_handler(300ms, {0, 0, 0, 1}));
  const auto bindings = bind_team({2, 1}, "slow:1,heuristic:1", {{"slow", server.endpoint("slow")}});
  EvalOptions o = options(1, 2);
  o.deadline = 30ms;
  const SuccessReport r = run_eval(config_for({2, 1}, 30.0), bindings, o);
  EXPECT_EQ(r.aborted, 2);
  EXPECT_TRUE(r.unreliable);
  EXPECT_EQ(r.mean, 0.0);
  for (const auto& rec : r.records) EXPECT_NE(rec.error.find("did not answer"), std::string::npos) << rec.error;
}

TEST(Report, TwoSettingsByTwoBindingsGiveFourRows) {
  std::vector<SuccessReport> reports;
  for (Setting s : {Setting{2, 1}, Setting{3, 3}}) {
    const SimConfig config = config_for(s, 5.0);
    auto b = default_bindings(s);
    reports.push_back(run_eval(config, b, options(2, 1)));
    EvalOptions masked = options(2, 1);
    masked.mask_teammates = true;
    reports.push_back(run_eval(config, b, masked));
  }
  TempDir dir;
  emit_report(reports, dir.path() / "a");
  emit_report(reports, dir.path() / "b");
  for (const char* f : {"report.csv", "report.md", "episodes.jsonl"})
    EXPECT_EQ(slurp(dir.path() / "a" / f), slurp(dir.path() / "b" / f)) << f;

  const auto rows = load_report_rows(dir.path() / "a" / "report.csv");
  ASSERT_EQ(rows.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    const SuccessReport& r = reports[i];
    EXPECT_EQ(rows[i].setting, r.setting);
    EXPECT_EQ(rows[i].combination, r.combination);
    EXPECT_EQ(rows[i].mask_teammates, r.mask_teammates);
    EXPECT_EQ(rows[i].seeds, 2);
    EXPECT_EQ(rows[i].episodes, 2);
    EXPECT_NEAR(rows[i].mean, r.mean, 1e-4);
    EXPECT_NEAR(rows[i].std, r.std, 1e-4);
    EXPECT_EQ(rows[i].config_hash, r.config_hash);
    EXPECT_EQ(rows[i].config_hash.size(), 16u);
  }
  EXPECT_NE(rows[0].config_hash, rows[2].config_hash);

  std::ifstream jl(dir.path() / "a" / "episodes.jsonl");
  int lines = 0;
  for (std::string line; std::getline(jl, line);) {
    const auto j = nlohmann::json::parse(line);
    for (const char* key : {"setting", "combination", "seed", "outcome", "duration", "trajectory_hash"})
      EXPECT_TRUE(j.contains(key)) << key;
    ++lines;
  }
  EXPECT_EQ(lines, 8);
}

TEST(Report, ConfigHashTracksTheConfig) {
  SimConfig a = config_for({3, 3}, 120.0);
  SimConfig b = a;
  EXPECT_EQ(config_hash(a), config_hash(b));
  b.world.hider_speed = 2.0;
  EXPECT_NE(config_hash(a), config_hash(b));
}

TEST(Report, SchemaErrors) {
  TempDir dir;
  const fs::path p = dir.path() / "report.csv";
  const std::string good = "3v3,heuristic:3,heuristic,0,3,450,0,36.4000,4.1000,0,0123456789abcdef\n";
  write(p, kHeader + good);
  ASSERT_EQ(load_report_rows(p).size(), 1u);

  const std::vector<std::string> bad_rows = {
      "3v3,heuristic:3,heuristic,0,3,450,0,36.4000,4.1000,0\n",           // missing field
      "3v3,heuristic:3,heuristic,0,three,450,0,36.4,4.1,0,0123456789abcdef\n",  // seeds
      "3v3,heuristic:3,heuristic,0,3,450,0,x,4.1,0,0123456789abcdef\n",        // mean
      "3v3,heuristic:3,heuristic,2,3,450,0,36.4,4.1,0,0123456789abcdef\n",     // flag
      ",heuristic:3,heuristic,0,3,450,0,36.4,4.1,0,0123456789abcdef\n",        // empty setting
      "3v3,heuristic:3,heuristic,0,3,450,0,36.4,4.1,0,\n",                     // empty hash
  };
  for (const auto& row : bad_rows) {
    write(p, kHeader + good + row);
    try {
      load_report_rows(p);
      ADD_FAILURE() << "accepted " << row;
    } catch (const ReportError& e) {
      EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
    }
  }
  write(p, "setting,combination\n" + good);
  EXPECT_THROW(load_report_rows(p), ReportError);
  EXPECT_THROW(load_report_rows(dir.path() / "missing.csv"), ReportError);
}
