#pragma once

#include <string>
#include <vector>

#include <boost/asio/io_context.hpp>
#include <boost/asio/signal_set.hpp>

#include "hideseek/config.hpp"
#include "hideseek/policy.hpp"

namespace hs::cli {

inline EndpointRegistry parse_endpoints(const std::vector<std::string>& items) {
  EndpointRegistry reg;
  for (const std::string& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ConfigError("--endpoint expects name=host:port/policy, got " + item);
    reg[item.substr(0, eq)] = Endpoint::parse(item.substr(eq + 1));
  }
  return reg;
}

inline void apply_sets(SimConfig& config, const std::vector<std::string>& sets) {
  for (const std::string& kv : sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got " + kv);
    apply_config_value(config, kv.substr(0, eq), kv.substr(eq + 1));
  }
}

/// Blocks until SIGINT or SIGTERM.
inline void wait_for_signal() {
  boost::asio::io_context io;
  boost::asio::signal_set signals(io, SIGINT, SIGTERM);
  signals.async_wait([](const boost::system::error_code&, int) {});
  io.run();
}

}  // namespace hs::cli
