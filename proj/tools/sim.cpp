// sim: headless episodes for a setting and seed.
//
//   sim run --setting 3v3 --seed 7 --episodes 10
//   sim run --bind seeker0=il-long --endpoint il-long=127.0.0.1:5555/il-long
//   sim run --bind heuristic:2,il-long:1 --endpoint il-long=127.0.0.1:5555/il-long
//   sim run --set hider_speed=2 --set enforce_role_asymmetry=false --record out/

#include <chrono>
#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "hideseek/dataset.hpp"
#include "hideseek/episode.hpp"
#include "hideseek/eval.hpp"
#include "cli_common.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Headless hide-and-seek simulator"};
  app.require_subcommand(1);
  auto* run = app.add_subcommand("run", "Run episodes and print one line each");

  std::string config_path, setting_text = "3v3", record_dir;
  std::vector<std::string> sets, endpoints, binds;
  std::uint64_t seed = 0;
  int episodes = 1;
  int deadline_ms = 100;
  bool mask_teammates = false;
  run->add_option("--config", config_path, "Config file (key = value lines)");
  run->add_option("--setting", setting_text, "Team sizes, e.g. 3v3");
  run->add_option("--seed", seed, "Base seed; episode e uses derive_seed(seed, e)");
  run->add_option("--episodes", episodes, "Number of episodes")->check(CLI::PositiveNumber);
  run->add_option("--bind", binds, "seeker<k>=name, or a team spec such as heuristic:2,il-long:1");
  run->add_option("--endpoint", endpoints, "Served policy, name=host:port/policy");
  run->add_option("--set", sets, "Config override key=value");
  run->add_option("--record", record_dir, "Write episodes in dataset layout here");
  run->add_option("--deadline-ms", deadline_ms, "Remote policy deadline");
  run->add_flag("--mask-teammates", mask_teammates, "Hide teammates in rendered frames");

  CLI11_PARSE(app, argc, argv);

  try {
    hs::SimConfig config = config_path.empty() ? hs::SimConfig{} : hs::load_config(config_path);
    config.world.set_setting(hs::Setting::parse(setting_text));
    hs::cli::apply_sets(config, sets);
    config.world.validate();
    const auto registry = hs::cli::parse_endpoints(endpoints);
    auto bindings = hs::default_bindings(config.world.setting());
    for (const std::string& b : binds) {
      if (b.find('=') != std::string::npos) hs::bind_seeker(bindings, b, registry);
      else bindings = hs::bind_team(config.world.setting(), b, registry);
    }

    int successes = 0, aborted = 0;
    double sim_time = 0.0;
    const auto t0 = std::chrono::steady_clock::now();
    for (int e = 0; e < episodes; ++e) {
      const std::uint64_t s = hs::episode_seed(seed, e);
      hs::EpisodeOptions opts;
      opts.render.mask_teammates = mask_teammates;
      opts.deadline = std::chrono::milliseconds(deadline_ms);
      opts.record = !record_dir.empty();
      opts.episode_id = std::to_string(e);
      hs::EpisodeLog log;
      const hs::EpisodeResult r = hs::run_episode(config, bindings, s, opts.record ? &log : nullptr, opts);
      if (opts.record) hs::write_episode(log, record_dir);
      successes += r.outcome == hs::Outcome::Success;
      aborted += r.outcome == hs::Outcome::Aborted;
      sim_time += r.duration;
      int caught = 0;
      for (const auto& t : r.catch_times) caught += t.has_value();
      std::printf("episode %d seed %llu outcome %s caught %d/%zu duration %.1f hash %016llx%s%s\n", e,
                  static_cast<unsigned long long>(s), std::string(hs::to_string(r.outcome)).c_str(), caught,
                  r.catch_times.size(), r.duration,
                  static_cast<unsigned long long>(r.trajectory_hash), r.error.empty() ? "" : " error ",
                  r.error.c_str());
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const int valid = episodes - aborted;
    std::printf("setting %s episodes %d success %d aborted %d rate %.1f%% realtime x%.0f\n",
                config.world.setting().str().c_str(), episodes, successes, aborted,
                valid ? 100.0 * successes / valid : 0.0, wall > 0 ? sim_time / wall : 0.0);
  } catch (const std::exception& e) {
    std::cerr << "sim: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
