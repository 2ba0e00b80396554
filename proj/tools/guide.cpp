// guide: serves guided sessions over HTTP and WebSocket.
//
//   guide serve --port 8080 --record out/
//   curl -X POST localhost:8080/sessions -d '{"setting":"2v1","seed":3}'

#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "hideseek/guidance_server.hpp"
#include "cli_common.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Single-operator guidance server"};
  app.require_subcommand(1);
  auto* serve = app.add_subcommand("serve", "Listen for sessions until interrupted");

  int port = 8080;
  std::string address = "127.0.0.1", config_path, record_dir;
  std::vector<std::string> sets, endpoints;
  double pacing = 1.0;
  serve->add_option("--port", port, "Listen port (0 picks one)")->check(CLI::Range(0, 65535));
  serve->add_option("--address", address, "Listen address");
  serve->add_option("--record", record_dir, "Write finished sessions in dataset layout here");
  serve->add_option("--config", config_path, "Default config for new sessions");
  serve->add_option("--set", sets, "Config override key=value");
  serve->add_option("--endpoint", endpoints, "Served policy, name=host:port/policy");
  serve->add_option("--pacing", pacing, "Speed relative to real time; 0 runs unpaced");

  CLI11_PARSE(app, argc, argv);

  try {
    hs::GuidanceServerOptions opts;
    opts.address = address;
    opts.port = static_cast<std::uint16_t>(port);
    opts.pacing = pacing;
    if (!record_dir.empty()) opts.record_dir = record_dir;
    opts.defaults = config_path.empty() ? hs::SimConfig{} : hs::load_config(config_path);
    hs::cli::apply_sets(opts.defaults, sets);
    opts.defaults.world.validate();
    opts.registry = hs::cli::parse_endpoints(endpoints);
    hs::GuidanceServer server(opts);
    std::printf("guide listening on %s:%u\n", address.c_str(), static_cast<unsigned>(server.port()));
    std::fflush(stdout);
    hs::cli::wait_for_signal();
    server.stop();
    server.wait();
  } catch (const std::exception& e) {
    std::cerr << "guide: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
