// policy_mock: stand-in policy servers for bridge testing.
//
//   policy_mock --port 5555 echo --x 10 --y 20
//   policy_mock --port 5555 clone
//   policy_mock --port 5555 sleep --ms 500

#include <cmath>
#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "hideseek/clone_policy.hpp"
#include "cli_common.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Mock policy server speaking the framed bridge protocol"};
  app.require_subcommand(1);
  int port = 0;
  std::string address = "127.0.0.1";
  double arena_side = 50.0;
  app.add_option("--port", port, "Listen port (0 picks one)")->check(CLI::Range(0, 65535));
  app.add_option("--address", address, "Listen address");
  app.add_option("--arena-side", arena_side, "Arena side in meters");

  double x = 25.0, y = 25.0, o = 0.0;
  auto* echo = app.add_subcommand("echo", "Answer every request with one fixed pose");
  echo->add_option("--x", x);
  echo->add_option("--y", y);
  echo->add_option("--o", o, "Orientation in radians");
  int expected_n = 0;
  auto* clone = app.add_subcommand("clone", "Chase green blobs decoded from the frames");
  clone->add_option("--n", expected_n, "Required stack depth; 0 accepts any");
  int delay_ms = 1000;
  auto* sleep = app.add_subcommand("sleep", "Answer after a delay");
  sleep->add_option("--ms", delay_ms);

  CLI11_PARSE(app, argc, argv);

  try {
    const hs::Action fixed = hs::encode_action({x, y}, o, arena_side);
    hs::PolicyHandler handler;
    if (*echo) handler = hs::echo_handler(fixed);
    else if (*clone) handler = hs::clone_handler(arena_side, expected_n);
    else handler = hs::sleep_handler(std::chrono::milliseconds(delay_ms), fixed);
    hs::PolicyServer server(handler, static_cast<std::uint16_t>(port), address);
    std::printf("policy_mock listening on %s:%u\n", address.c_str(), static_cast<unsigned>(server.port()));
    std::fflush(stdout);
    hs::cli::wait_for_signal();
    server.stop();
  } catch (const std::exception& e) {
    std::cerr << "policy_mock: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
