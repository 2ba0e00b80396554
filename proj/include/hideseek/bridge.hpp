#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "hideseek/action.hpp"

namespace hs {

/// Any failure to obtain an action from a served policy. Episodes that hit
/// one are aborted, never silently continued.
class PolicyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class PolicyTimeout : public PolicyError {
 public:
  using PolicyError::PolicyError;
};
class ProtocolError : public PolicyError {
 public:
  using PolicyError::PolicyError;
};
class ShapeError : public PolicyError {
 public:
  using PolicyError::PolicyError;
};

/// `host:port/policy_name`
struct Endpoint {
  std::string host;
  std::uint16_t port = 0;
  std::string policy;

  static Endpoint parse(std::string_view text);
  std::string str() const;
  bool operator==(const Endpoint&) const = default;
};

struct RequestHeader {
  std::string policy;
  int agent_id = 0;
  int n = 0;
  int h = 0;
  int w = 0;
  int c = 0;
  std::string dtype = "u8";

  std::size_t tensor_bytes() const { return std::size_t(n) * h * w * c; }
  bool operator==(const RequestHeader&) const = default;
};

struct PolicyRequest {
  RequestHeader header;
  std::vector<std::uint8_t> tensor;
  bool operator==(const PolicyRequest&) const = default;
};

/// Wire format: u64 little-endian payload length, then the payload. Request
/// payload = compact JSON header (keys in the order policy, agent_id, n, h,
/// w, c, dtype) immediately followed by the raw row-major tensor bytes.
/// Response payload = JSON {x, y, sin_o, cos_o} or {error, message}.
constexpr std::size_t kMaxPayload = std::size_t{1} << 28;

std::vector<std::uint8_t> encode_request(const PolicyRequest& request);
/// Decodes a request payload (without the length prefix). Throws
/// ProtocolError on malformed input and ShapeError when the tensor size
/// disagrees with the header.
PolicyRequest decode_request(std::span<const std::uint8_t> payload);

std::vector<std::uint8_t> encode_response(const Action& action);
/// `kind` is "shape" or "protocol".
std::vector<std::uint8_t> encode_error_response(std::string_view kind, std::string_view message);
/// Throws ShapeError / ProtocolError for error responses.
Action decode_response(std::span<const std::uint8_t> payload);

/// Adds / checks the 8-byte little-endian length prefix.
std::vector<std::uint8_t> frame(std::span<const std::uint8_t> payload);
std::uint64_t read_length_prefix(std::span<const std::uint8_t, 8> prefix);

/// Blocking client for one bound agent. Every query must finish within the
/// deadline, otherwise the connection is dropped and PolicyTimeout thrown.
class BridgeClient {
 public:
  BridgeClient(Endpoint endpoint, std::chrono::milliseconds deadline = std::chrono::milliseconds(100));
  ~BridgeClient();
  BridgeClient(const BridgeClient&) = delete;
  BridgeClient& operator=(const BridgeClient&) = delete;

  Action query(int agent_id, int n, std::span<const std::uint8_t> stacked_obs);
  const Endpoint& endpoint() const { return endpoint_; }

 private:
  struct Impl;
  Endpoint endpoint_;
  std::chrono::milliseconds deadline_;
  std::unique_ptr<Impl> impl_;
};

/// Maps a decoded request to an action. Throwing ShapeError or ProtocolError
/// sends the matching error response and closes the connection.
using PolicyHandler = std::function<Action(const PolicyRequest&)>;

/// Threaded TCP server speaking the bridge protocol, one thread per
/// connection. Port 0 binds an ephemeral port.
class PolicyServer {
 public:
  PolicyServer(PolicyHandler handler, std::uint16_t port = 0, std::string address = "127.0.0.1");
  ~PolicyServer();
  PolicyServer(const PolicyServer&) = delete;
  PolicyServer& operator=(const PolicyServer&) = delete;

  std::uint16_t port() const;
  Endpoint endpoint(std::string policy) const;
  void stop();
  /// Blocks until stop() is called from another thread.
  void wait();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace hs
