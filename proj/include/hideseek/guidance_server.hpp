#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "hideseek/guidance.hpp"

namespace hs {

struct GuidanceServerOptions {
  std::string address = "127.0.0.1";
  std::uint16_t port = 0;  // 0 picks a free port
  /// Decisions run every decision_period / pacing seconds of wall clock;
  /// 1 is real time, values <= 0 run unpaced.
  double pacing = 1.0;
  std::optional<std::filesystem::path> record_dir;
  SimConfig defaults;
  EndpointRegistry registry;
  int io_threads = 2;
};

/// HTTP + WebSocket front end for guided sessions.
///   POST /sessions            body {setting?, seed?, team?, config?{key: value}}
///                             -> {id, ws}
///   GET  /sessions/<id>/result -> {status, ...}
///   WS   /session/<id>        server sends one {type:"map"} then
///                             {type:"state"} every decision; the client sends
///                             {type:"select"|"waypoint"|"release"|"pause"|"resume"}
///                             and gets {type:"ack"} or {type:"error", message}.
class GuidanceServer {
 public:
  explicit GuidanceServer(GuidanceServerOptions options);
  ~GuidanceServer();
  GuidanceServer(const GuidanceServer&) = delete;
  GuidanceServer& operator=(const GuidanceServer&) = delete;

  std::uint16_t port() const;
  /// Starts a session from a POST /sessions body; throws ConfigError or
  /// BindingError for invalid requests.
  std::string create_session(const nlohmann::json& request);
  /// Body of GET /sessions/<id>/result, or nullopt for an unknown id.
  std::optional<nlohmann::json> session_result(const std::string& id) const;

  void stop();
  void wait();

  struct Impl;

 private:
  std::shared_ptr<Impl> impl_;
};

}  // namespace hs
