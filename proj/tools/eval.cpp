// eval: success-rate sweeps over settings and seeker teams.
//
//   eval --setting 3v3 --bind "il-long:2,pe-t:1" --seeds 3 --episodes 150 \
//        --endpoint il-long=127.0.0.1:5555/il-long --endpoint pe-t=127.0.0.1:5556/pe-t --out report/

#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "hideseek/eval.hpp"
#include "cli_common.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Evaluate seeker teams over paired seeds"};
  std::vector<std::string> settings{"3v3"}, teams, sets, endpoints;
  std::string config_path, out = "report";
  hs::EvalOptions opts;
  int deadline_ms = 100;
  bool both_masks = false;
  app.add_option("--setting", settings, "Settings to sweep, e.g. 2v1 3v3");
  app.add_option("--bind", teams, "Team specs to compare; defaults to all heuristic");
  app.add_option("--seeds", opts.n_seeds, "Seeds per row")->check(CLI::PositiveNumber);
  app.add_option("--episodes", opts.episodes_per_seed, "Episodes per seed")->check(CLI::PositiveNumber);
  app.add_option("--base-seed", opts.base_seed, "Root of the seed sweep");
  app.add_option("--threads", opts.threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--mask-teammates", opts.mask_teammates, "Hide teammates in rendered frames");
  app.add_flag("--both-masks", both_masks, "Emit rows with and without teammate masking");
  app.add_option("--deadline-ms", deadline_ms, "Remote policy deadline");
  app.add_option("--endpoint", endpoints, "Served policy, name=host:port/policy");
  app.add_option("--config", config_path, "Config file");
  app.add_option("--set", sets, "Config override key=value");
  app.add_option("--out", out, "Report directory");

  CLI11_PARSE(app, argc, argv);

  try {
    hs::SimConfig base = config_path.empty() ? hs::SimConfig{} : hs::load_config(config_path);
    hs::cli::apply_sets(base, sets);
    const auto registry = hs::cli::parse_endpoints(endpoints);
    opts.deadline = std::chrono::milliseconds(deadline_ms);

    std::vector<bool> masks{opts.mask_teammates};
    if (both_masks) masks = {false, true};
    std::vector<hs::SuccessReport> reports;
    for (const std::string& s : settings) {
      hs::SimConfig config = base;
      config.world.set_setting(hs::Setting::parse(s));
      config.world.validate();
      std::vector<std::string> specs = teams;
      if (specs.empty()) specs.push_back("heuristic:" + std::to_string(config.world.n_seekers));
      for (const std::string& spec : specs) {
        const auto bindings = hs::bind_team(config.world.setting(), spec, registry);
        for (bool mask : masks) {
          hs::EvalOptions o = opts;
          o.mask_teammates = mask;
          hs::SuccessReport r = hs::run_eval(config, bindings, o);
          std::printf("%s %s%s: %.1f +- %.1f (%d episodes, %d aborted)%s\n", r.setting.c_str(),
                      r.combination.c_str(), mask ? " masked" : "", r.mean, r.std, r.episodes, r.aborted,
                      r.unreliable ? " unreliable" : "");
          reports.push_back(std::move(r));
        }
      }
    }
    hs::emit_report(reports, out);
    std::printf("wrote %s\n", (std::filesystem::path(out) / "report.csv").string().c_str());
  } catch (const std::exception& e) {
    std::cerr << "eval: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
