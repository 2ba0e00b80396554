#include "hideseek/bridge.hpp"

#include <sys/socket.h>

#include <boost/asio.hpp>
#include <charconv>
#include <condition_variable>
#include <cmath>
#include <list>
#include <nlohmann/json.hpp>

namespace hs {

namespace asio = boost::asio;
using tcp = asio::ip::tcp;
using json = nlohmann::json;

Endpoint Endpoint::parse(std::string_view text) {
  const auto colon = text.rfind(':');
  const auto slash = text.find('/', colon == std::string_view::npos ? 0 : colon);
  if (colon == std::string_view::npos || slash == std::string_view::npos || colon == 0 ||
      slash + 1 >= text.size())
    throw std::invalid_argument("endpoint must look like host:port/policy, got '" +
                                std::string(text) + "'");
  Endpoint e;
  e.host = std::string(text.substr(0, colon));
  const auto port_text = text.substr(colon + 1, slash - colon - 1);
  unsigned port = 0;
  const auto [ptr, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
  if (ec != std::errc{} || ptr != port_text.data() + port_text.size() || port == 0 || port > 65535)
    throw std::invalid_argument("bad port in endpoint '" + std::string(text) + "'");
  e.port = static_cast<std::uint16_t>(port);
  e.policy = std::string(text.substr(slash + 1));
  return e;
}

std::string Endpoint::str() const { return host + ":" + std::to_string(port) + "/" + policy; }

std::vector<std::uint8_t> frame(std::span<const std::uint8_t> payload) {
  std::vector<std::uint8_t> out(8 + payload.size());
  const std::uint64_t n = payload.size();
  for (int i = 0; i < 8; ++i) out[i] = static_cast<std::uint8_t>(n >> (8 * i));
  std::copy(payload.begin(), payload.end(), out.begin() + 8);
  return out;
}

std::uint64_t read_length_prefix(std::span<const std::uint8_t, 8> prefix) {
  std::uint64_t n = 0;
  for (int i = 0; i < 8; ++i) n |= std::uint64_t{prefix[i]} << (8 * i);
  return n;
}

std::vector<std::uint8_t> encode_request(const PolicyRequest& request) {
  const auto& h = request.header;
  if (request.tensor.size() != h.tensor_bytes())
    throw ShapeError("tensor has " + std::to_string(request.tensor.size()) + " bytes, header says " +
                     std::to_string(h.tensor_bytes()));
  nlohmann::ordered_json header;
  header["policy"] = h.policy;
  header["agent_id"] = h.agent_id;
  header["n"] = h.n;
  header["h"] = h.h;
  header["w"] = h.w;
  header["c"] = h.c;
  header["dtype"] = h.dtype;
  const std::string text = header.dump();
  std::vector<std::uint8_t> payload(text.begin(), text.end());
  payload.insert(payload.end(), request.tensor.begin(), request.tensor.end());
  return payload;
}

namespace {

// Length of the leading JSON object, honoring strings and escapes.
std::size_t json_object_length(std::span<const std::uint8_t> bytes) {
  if (bytes.empty() || bytes[0] != '{') throw ProtocolError("payload does not start with a JSON header");
  int depth = 0;
  bool in_string = false, escaped = false;
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    const char ch = static_cast<char>(bytes[i]);
    if (in_string) {
      if (escaped) escaped = false;
      else if (ch == '\\') escaped = true;
      else if (ch == '"') in_string = false;
      continue;
    }
    if (ch == '"') in_string = true;
    else if (ch == '{') ++depth;
    else if (ch == '}' && --depth == 0) return i + 1;
  }
  throw ProtocolError("unterminated JSON header");
}

int dimension(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number_integer())
    throw ProtocolError(std::string("header field '") + key + "' missing or not an integer");
  const auto v = j[key].get<std::int64_t>();
  if (v < 1 || v > 65535) throw ShapeError(std::string("header field '") + key + "' out of range");
  return static_cast<int>(v);
}

}  // namespace

PolicyRequest decode_request(std::span<const std::uint8_t> payload) {
  const std::size_t n = json_object_length(payload);
  json j = json::parse(payload.begin(), payload.begin() + static_cast<std::ptrdiff_t>(n), nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ProtocolError("header is not valid JSON");
  PolicyRequest r;
  if (!j.contains("policy") || !j["policy"].is_string()) throw ProtocolError("header field 'policy' missing");
  if (!j.contains("agent_id") || !j["agent_id"].is_number_integer())
    throw ProtocolError("header field 'agent_id' missing");
  if (!j.contains("dtype") || j["dtype"] != "u8") throw ProtocolError("dtype must be \"u8\"");
  r.header.policy = j["policy"].get<std::string>();
  r.header.agent_id = j["agent_id"].get<int>();
  r.header.n = dimension(j, "n");
  r.header.h = dimension(j, "h");
  r.header.w = dimension(j, "w");
  r.header.c = dimension(j, "c");
  const std::size_t rest = payload.size() - n;
  if (rest != r.header.tensor_bytes())
    throw ShapeError("tensor has " + std::to_string(rest) + " bytes, header declares " +
                     std::to_string(r.header.tensor_bytes()));
  r.tensor.assign(payload.begin() + static_cast<std::ptrdiff_t>(n), payload.end());
  return r;
}

std::vector<std::uint8_t> encode_response(const Action& a) {
  nlohmann::ordered_json j;
  j["x"] = a.x;
  j["y"] = a.y;
  j["sin_o"] = a.sin_o;
  j["cos_o"] = a.cos_o;
  const std::string text = j.dump();
  return {text.begin(), text.end()};
}

std::vector<std::uint8_t> encode_error_response(std::string_view kind, std::string_view message) {
  nlohmann::ordered_json j;
  j["error"] = kind;
  j["message"] = message;
  const std::string text = j.dump();
  return {text.begin(), text.end()};
}

Action decode_response(std::span<const std::uint8_t> payload) {
  json j = json::parse(payload.begin(), payload.end(), nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ProtocolError("response is not a JSON object");
  if (j.contains("error")) {
    const std::string kind = j["error"].is_string() ? j["error"].get<std::string>() : "protocol";
    const std::string msg = j.value("message", std::string{});
    if (kind == "shape") throw ShapeError("policy rejected tensor shape: " + msg);
    throw ProtocolError("policy error (" + kind + "): " + msg);
  }
  Action a;
  for (auto [key, field] : {std::pair{"x", &a.x}, {"y", &a.y}, {"sin_o", &a.sin_o}, {"cos_o", &a.cos_o}}) {
    if (!j.contains(key) || !j[key].is_number())
      throw ProtocolError(std::string("response field '") + key + "' missing");
    *field = j[key].get<double>();
    if (!std::isfinite(*field)) throw ProtocolError(std::string("response field '") + key + "' not finite");
  }
  return a;
}

// ---------------------------------------------------------------- client

struct BridgeClient::Impl {
  asio::io_context io;
  tcp::socket socket{io};
  bool connected = false;

  // Runs queued async work until `done` or the deadline; on expiry the
  // socket is closed so the pending handlers complete with an error.
  bool run_until(const bool& done, std::chrono::steady_clock::time_point deadline) {
    io.restart();
    while (!done) {
      const auto now = std::chrono::steady_clock::now();
      if (now >= deadline) break;
      if (io.run_one_for(deadline - now) == 0 && io.stopped()) break;
    }
    if (done) return true;
    boost::system::error_code ignored;
    socket.close(ignored);
    io.restart();
    io.run();
    connected = false;
    return false;
  }
};

BridgeClient::BridgeClient(Endpoint endpoint, std::chrono::milliseconds deadline)
    : endpoint_(std::move(endpoint)), deadline_(deadline), impl_(std::make_unique<Impl>()) {}

BridgeClient::~BridgeClient() = default;

Action BridgeClient::query(int agent_id, int n, std::span<const std::uint8_t> stacked_obs) {
  constexpr int kSide = 156, kChannels = 4;
  PolicyRequest req;
  req.header = {endpoint_.policy, agent_id, n, kSide, kSide, kChannels, "u8"};
  req.tensor.assign(stacked_obs.begin(), stacked_obs.end());
  const auto out = frame(encode_request(req));

  Impl& s = *impl_;
  const auto start = std::chrono::steady_clock::now();
  if (!s.connected) {
    boost::system::error_code ec;
    tcp::resolver resolver(s.io);
    auto results = resolver.resolve(endpoint_.host, std::to_string(endpoint_.port), ec);
    if (ec) throw ProtocolError("cannot resolve " + endpoint_.str() + ": " + ec.message());
    bool done = false;
    s.socket = tcp::socket(s.io);
    asio::async_connect(s.socket, results, [&](const boost::system::error_code& e, const tcp::endpoint&) {
      ec = e;
      done = true;
    });
    const auto connect_deadline = start + std::max(deadline_, std::chrono::milliseconds(2000));
    if (!s.run_until(done, connect_deadline))
      throw PolicyTimeout("connecting to " + endpoint_.str() + " timed out");
    if (ec) throw ProtocolError("cannot connect to " + endpoint_.str() + ": " + ec.message());
    s.socket.set_option(tcp::no_delay(true));
    s.connected = true;
  }

  const auto deadline = std::chrono::steady_clock::now() + deadline_;
  boost::system::error_code ec;
  bool done = false;
  std::array<std::uint8_t, 8> prefix{};
  std::vector<std::uint8_t> payload;
  asio::async_write(s.socket, asio::buffer(out), [&](const boost::system::error_code& e, std::size_t) {
    if (e) {
      ec = e;
      done = true;
      return;
    }
    asio::async_read(s.socket, asio::buffer(prefix), [&](const boost::system::error_code& e2, std::size_t) {
      if (e2) {
        ec = e2;
        done = true;
        return;
      }
      const std::uint64_t len = read_length_prefix(prefix);
      if (len > kMaxPayload) {
        ec = asio::error::message_size;
        done = true;
        return;
      }
      payload.resize(len);
      asio::async_read(s.socket, asio::buffer(payload), [&](const boost::system::error_code& e3, std::size_t) {
        ec = e3;
        done = true;
      });
    });
  });
  if (!s.run_until(done, deadline))
    throw PolicyTimeout("policy " + endpoint_.str() + " did not answer within " +
                        std::to_string(deadline_.count()) + " ms");
  if (ec) {
    boost::system::error_code ignored;
    s.socket.close(ignored);
    s.connected = false;
    throw ProtocolError("connection to " + endpoint_.str() + " failed: " + ec.message());
  }
  try {
    return decode_response(payload);
  } catch (const PolicyError&) {
    boost::system::error_code ignored;
    s.socket.close(ignored);
    s.connected = false;
    throw;
  }
}

// ---------------------------------------------------------------- server

struct PolicyServer::Impl {
  struct Connection {
    tcp::socket socket;
    std::thread thread;
    bool done = false;
    explicit Connection(asio::io_context& io) : socket(io) {}
  };

  PolicyHandler handler;
  asio::io_context io;
  tcp::acceptor acceptor{io};
  std::thread accept_thread;
  std::mutex mutex;
  std::list<std::unique_ptr<Connection>> connections;
  std::atomic<bool> stopping{false};
  std::mutex wait_mutex;
  std::condition_variable stopped_cv;
  bool stopped = false;

  void serve(Connection& conn) {
    tcp::socket& sock = conn.socket;
    boost::system::error_code ec;
    auto send = [&](const std::vector<std::uint8_t>& payload) { asio::write(sock, asio::buffer(frame(payload)), ec); };
    while (!stopping) {
      std::array<std::uint8_t, 8> prefix{};
      asio::read(sock, asio::buffer(prefix), ec);
      if (ec) break;
      const std::uint64_t len = read_length_prefix(prefix);
      if (len > kMaxPayload) {
        send(encode_error_response("protocol", "payload too large"));
        break;
      }
      std::vector<std::uint8_t> payload(len);
      asio::read(sock, asio::buffer(payload), ec);
      if (ec) break;
      try {
        send(encode_response(handler(decode_request(payload))));
      } catch (const ShapeError& e) {
        send(encode_error_response("shape", e.what()));
        break;
      } catch (const std::exception& e) {
        send(encode_error_response("protocol", e.what()));
        break;
      }
      if (ec) break;
    }
    std::lock_guard lock(mutex);
    sock.close(ec);
    conn.done = true;
  }

  // Joins connection threads that have finished.
  void reap() {
    std::list<std::unique_ptr<Connection>> finished;
    {
      std::lock_guard lock(mutex);
      for (auto it = connections.begin(); it != connections.end();) {
        if ((*it)->done) finished.splice(finished.end(), connections, it++);
        else ++it;
      }
    }
    for (auto& c : finished) c->thread.join();
  }

  void accept_loop() {
    for (;;) {
      auto conn = std::make_unique<Connection>(io);
      boost::system::error_code ec;
      acceptor.accept(conn->socket, ec);
      if (stopping) break;
      reap();
      if (ec) continue;
      conn->socket.set_option(tcp::no_delay(true), ec);
      Connection& ref = *conn;
      std::lock_guard lock(mutex);
      connections.push_back(std::move(conn));
      ref.thread = std::thread([this, &ref] { serve(ref); });
    }
  }
};

PolicyServer::PolicyServer(PolicyHandler handler, std::uint16_t port, std::string address)
    : impl_(std::make_unique<Impl>()) {
  impl_->handler = std::move(handler);
  const tcp::endpoint ep(asio::ip::make_address(address), port);
  impl_->acceptor.open(ep.protocol());
  impl_->acceptor.set_option(tcp::acceptor::reuse_address(true));
  impl_->acceptor.bind(ep);
  impl_->acceptor.listen();
  impl_->accept_thread = std::thread([this] { impl_->accept_loop(); });
}

PolicyServer::~PolicyServer() { stop(); }

std::uint16_t PolicyServer::port() const { return impl_->acceptor.local_endpoint().port(); }

Endpoint PolicyServer::endpoint(std::string policy) const {
  return {"127.0.0.1", port(), std::move(policy)};
}

void PolicyServer::stop() {
  if (impl_->stopping.exchange(true)) return;
  // shutdown(2) wakes threads blocked in accept/read on these descriptors.
  ::shutdown(impl_->acceptor.native_handle(), SHUT_RDWR);
  if (impl_->accept_thread.joinable()) impl_->accept_thread.join();
  {
    std::lock_guard lock(impl_->mutex);
    for (auto& c : impl_->connections)
      if (!c->done) ::shutdown(c->socket.native_handle(), SHUT_RDWR);
  }
  for (auto& c : impl_->connections) c->thread.join();
  impl_->connections.clear();
  boost::system::error_code ignored;
  impl_->acceptor.close(ignored);
  {
    std::lock_guard lock(impl_->wait_mutex);
    impl_->stopped = true;
  }
  impl_->stopped_cv.notify_all();
}

void PolicyServer::wait() {
  std::unique_lock lock(impl_->wait_mutex);
  impl_->stopped_cv.wait(lock, [this] { return impl_->stopped; });
}

}  // namespace hs
