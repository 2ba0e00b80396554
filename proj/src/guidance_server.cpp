#include "hideseek/guidance_server.hpp"

#include <atomic>
#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <condition_variable>
#include <deque>
#include <map>
#include <thread>

namespace hs {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;
using json = nlohmann::json;

namespace {

class WsConnection;

struct LiveSession {
  std::string id;
  std::unique_ptr<GuidedSession> session;
  std::string map_text;
  std::mutex mutex;  // guards state_text, connections and result
  std::string state_text;
  std::vector<std::weak_ptr<WsConnection>> connections;
  std::optional<json> result;
  std::thread loop;
};

class WsConnection : public std::enable_shared_from_this<WsConnection> {
 public:
  WsConnection(tcp::socket socket, std::shared_ptr<LiveSession> session)
      : ws_(std::move(socket)), session_(std::move(session)) {}

  void start(http::request<http::string_body> req) {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(req, beast::bind_front_handler(&WsConnection::on_accept, shared_from_this()));
  }

  void send(std::string text) {
    asio::post(ws_.get_executor(), [self = shared_from_this(), text = std::move(text)]() mutable {
      self->queue_.push_back(std::move(text));
      if (self->queue_.size() == 1) self->write_next();
    });
  }

 private:
  void on_accept(beast::error_code ec) {
    if (ec) return;
    std::string state;
    {
      std::lock_guard lock(session_->mutex);
      session_->connections.push_back(weak_from_this());
      state = session_->state_text;
    }
    send(session_->map_text);
    if (!state.empty()) send(state);
    read_next();
  }

  void read_next() {
    ws_.async_read(buffer_, beast::bind_front_handler(&WsConnection::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec) return;
    const std::string text = beast::buffers_to_string(buffer_.data());
    buffer_.consume(buffer_.size());
    json reply;
    try {
      const json msg = json::parse(text);
      session_->session->submit(GuidanceCommand::from_json(msg));
      reply = {{"type", "ack"}, {"command", msg["type"]}};
    } catch (const std::exception& e) {
      reply = {{"type", "error"}, {"message", e.what()}};
    }
    send(reply.dump());
    read_next();
  }

  void write_next() {
    ws_.text(true);
    ws_.async_write(asio::buffer(queue_.front()),
                    beast::bind_front_handler(&WsConnection::on_write, shared_from_this()));
  }

  void on_write(beast::error_code ec, std::size_t) {
    if (ec) {
      queue_.clear();
      return;
    }
    queue_.pop_front();
    if (!queue_.empty()) write_next();
  }

  websocket::stream<beast::tcp_stream> ws_;
  std::shared_ptr<LiveSession> session_;
  beast::flat_buffer buffer_;
  std::deque<std::string> queue_;
};

}  // namespace

struct GuidanceServer::Impl : std::enable_shared_from_this<GuidanceServer::Impl> {
  GuidanceServerOptions options;
  asio::io_context io;
  tcp::acceptor acceptor{io};
  std::vector<std::thread> threads;
  mutable std::mutex mutex;
  std::map<std::string, std::shared_ptr<LiveSession>> sessions;
  int next_id = 1;
  std::mutex record_mutex;
  std::atomic<bool> stopping{false};
  std::condition_variable stopped_cv;
  bool stopped = false;

  void broadcast(LiveSession& s, const std::string& text) {
    std::vector<std::shared_ptr<WsConnection>> live;
    {
      std::lock_guard lock(s.mutex);
      s.state_text = text;
      for (auto it = s.connections.begin(); it != s.connections.end();) {
        if (auto c = it->lock()) {
          live.push_back(std::move(c));
          ++it;
        } else {
          it = s.connections.erase(it);
        }
      }
    }
    for (auto& c : live) c->send(text);
  }

  void run_session(std::shared_ptr<LiveSession> s) {
    const double period = s->session->world().config.decision_period();
    const auto step = options.pacing > 0 ? std::chrono::duration<double>(period / options.pacing)
                                         : std::chrono::duration<double>(0);
    auto next = std::chrono::steady_clock::now();
    broadcast(*s, s->session->state_message().dump());
    while (!stopping && !s->session->finished()) {
      next += std::chrono::duration_cast<std::chrono::steady_clock::duration>(step);
      std::this_thread::sleep_until(next);
      s->session->advance();
      broadcast(*s, s->session->state_message().dump());
    }
    json result = result_json(*s->session);
    if (s->session->finished() && options.record_dir) {
      try {
        std::lock_guard lock(record_mutex);
        write_episode(s->session->take_log(), *options.record_dir, "guided");
        result["recorded"] = true;
      } catch (const std::exception& e) {
        result["record_error"] = e.what();
      }
    }
    std::lock_guard lock(s->mutex);
    s->result = result;
  }

  static json result_json(const GuidedSession& g) {
    const EpisodeResult r = g.result();
    json catches = json::array();
    for (const auto& t : r.catch_times) catches.push_back(t ? json(*t) : json(nullptr));
    int human_steps = 0;
    for (const auto& h : g.human_log()) human_steps += h.has_value();
    json ivs = json::array();
    for (const Intervention& iv : g.interventions())
      ivs.push_back({{"seeker_id", iv.seeker_id}, {"x", iv.waypoint.x}, {"y", iv.waypoint.y},
                     {"issue_tick", iv.issue_tick}, {"state", to_string(iv.state)},
                     {"end_tick", iv.end_tick ? json(*iv.end_tick) : json(nullptr)}});
    return {{"status", g.finished() ? "finished" : "stopped"},
            {"outcome", to_string(r.outcome)},
            {"duration", r.duration},
            {"seed", r.seed},
            {"catch_times", catches},
            {"trajectory_hash", std::to_string(r.trajectory_hash)},
            {"human_decisions", human_steps},
            {"interventions", ivs}};
  }

  std::string create(const json& req) {
    if (!req.is_object()) throw ConfigError("session request must be a JSON object");
    SimConfig config = options.defaults;
    if (req.contains("config")) {
      if (!req["config"].is_object()) throw ConfigError("'config' must be an object");
      for (const auto& [key, value] : req["config"].items())
        apply_config_value(config, key, value.is_string() ? value.get<std::string>() : value.dump());
    }
    if (req.contains("setting")) config.world.set_setting(Setting::parse(req.value("setting", "")));
    config.world.validate();
    const std::uint64_t seed = req.contains("seed") ? req["seed"].get<std::uint64_t>() : config.world.seed;
    const std::string team =
        req.value("team", "heuristic:" + std::to_string(config.world.n_seekers));
    auto bindings = bind_team(config.world.setting(), team, options.registry);

    auto s = std::make_shared<LiveSession>();
    {
      std::lock_guard lock(mutex);
      s->id = "s" + std::to_string(next_id++);
    }
    EpisodeOptions eo;
    eo.record = options.record_dir.has_value();
    eo.episode_id = s->id + "_seed" + std::to_string(seed);
    s->session = std::make_unique<GuidedSession>(config, std::move(bindings), seed, eo);
    s->map_text = s->session->map_message().dump();
    {
      std::lock_guard lock(mutex);
      sessions[s->id] = s;
    }
    s->loop = std::thread([self = shared_from_this(), s] { self->run_session(s); });
    return s->id;
  }

  std::shared_ptr<LiveSession> find(const std::string& id) const {
    std::lock_guard lock(mutex);
    auto it = sessions.find(id);
    return it == sessions.end() ? nullptr : it->second;
  }

  std::optional<json> result(const std::string& id) const {
    auto s = find(id);
    if (!s) return std::nullopt;
    std::lock_guard lock(s->mutex);
    if (s->result) return *s->result;
    return json{{"status", "running"}, {"tick", json::parse(s->state_text.empty() ? "{}" : s->state_text).value("tick", 0)}};
  }

  http::response<http::string_body> handle(const http::request<http::string_body>& req) {
    auto reply = [&](http::status status, const json& body) {
      http::response<http::string_body> res{status, req.version()};
      res.set(http::field::content_type, "application/json");
      res.set(http::field::access_control_allow_origin, "*");
      res.keep_alive(req.keep_alive());
      res.body() = body.dump();
      res.prepare_payload();
      return res;
    };
    const std::string target(req.target());
    if (req.method() == http::verb::post && target == "/sessions") {
      try {
        const json body = req.body().empty() ? json::object() : json::parse(req.body());
        const std::string id = create(body);
        return reply(http::status::created, {{"id", id}, {"ws", "/session/" + id}});
      } catch (const std::exception& e) {
        return reply(http::status::bad_request, {{"error", e.what()}});
      }
    }
    const std::string prefix = "/sessions/", suffix = "/result";
    if (req.method() == http::verb::get && target.starts_with(prefix) && target.ends_with(suffix) &&
        target.size() > prefix.size() + suffix.size()) {
      const std::string id = target.substr(prefix.size(), target.size() - prefix.size() - suffix.size());
      if (auto r = result(id)) return reply(http::status::ok, *r);
      return reply(http::status::not_found, {{"error", "unknown session " + id}});
    }
    return reply(http::status::not_found, {{"error", "no route for " + target}});
  }

  void accept();
};

namespace {

class HttpConnection : public std::enable_shared_from_this<HttpConnection> {
 public:
  HttpConnection(tcp::socket socket, std::shared_ptr<GuidanceServer::Impl> server)
      : stream_(std::move(socket)), server_(std::move(server)) {}

  void read() {
    req_ = {};
    stream_.expires_after(std::chrono::seconds(60));
    http::async_read(stream_, buffer_, req_, beast::bind_front_handler(&HttpConnection::on_read, shared_from_this()));
  }

 private:
  void on_read(beast::error_code ec, std::size_t) {
    if (ec) return close();
    if (websocket::is_upgrade(req_)) {
      const std::string target(req_.target());
      const std::string prefix = "/session/";
      std::shared_ptr<LiveSession> s;
      if (target.starts_with(prefix)) s = server_->find(target.substr(prefix.size()));
      if (s) {
        stream_.expires_never();
        std::make_shared<WsConnection>(stream_.release_socket(), s)->start(std::move(req_));
        return;
      }
    }
    auto res = std::make_shared<http::response<http::string_body>>(server_->handle(req_));
    http::async_write(stream_, *res, [self = shared_from_this(), res](beast::error_code e, std::size_t) {
      if (!e && res->keep_alive()) self->read();
      else self->close();
    });
  }

  void close() {
    beast::error_code ec;
    stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
  }

  beast::tcp_stream stream_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> req_;
  std::shared_ptr<GuidanceServer::Impl> server_;
};

}  // namespace

void GuidanceServer::Impl::accept() {
  acceptor.async_accept(asio::make_strand(io), [self = shared_from_this()](beast::error_code ec, tcp::socket socket) {
    if (self->stopping) return;
    if (!ec) std::make_shared<HttpConnection>(std::move(socket), self)->read();
    self->accept();
  });
}

GuidanceServer::GuidanceServer(GuidanceServerOptions options) : impl_(std::make_shared<Impl>()) {
  impl_->options = std::move(options);
  const tcp::endpoint ep(asio::ip::make_address(impl_->options.address), impl_->options.port);
  impl_->acceptor.open(ep.protocol());
  impl_->acceptor.set_option(tcp::acceptor::reuse_address(true));
  impl_->acceptor.bind(ep);
  impl_->acceptor.listen();
  impl_->accept();
  for (int i = 0; i < std::max(1, impl_->options.io_threads); ++i)
    impl_->threads.emplace_back([impl = impl_] { impl->io.run(); });
}

GuidanceServer::~GuidanceServer() { stop(); }

std::uint16_t GuidanceServer::port() const { return impl_->acceptor.local_endpoint().port(); }

std::string GuidanceServer::create_session(const json& request) { return impl_->create(request); }

std::optional<json> GuidanceServer::session_result(const std::string& id) const { return impl_->result(id); }

void GuidanceServer::stop() {
  if (impl_->stopping.exchange(true)) return;
  std::vector<std::shared_ptr<LiveSession>> sessions;
  {
    std::lock_guard lock(impl_->mutex);
    for (auto& [id, s] : impl_->sessions) sessions.push_back(s);
  }
  for (auto& s : sessions)
    if (s->loop.joinable()) s->loop.join();
  asio::post(impl_->io, [impl = impl_] {
    beast::error_code ec;
    impl->acceptor.close(ec);
  });
  impl_->io.stop();
  for (auto& t : impl_->threads)
    if (t.joinable()) t.join();
  {
    std::lock_guard lock(impl_->mutex);
    impl_->stopped = true;
  }
  impl_->stopped_cv.notify_all();
}

void GuidanceServer::wait() {
  std::unique_lock lock(impl_->mutex);
  impl_->stopped_cv.wait(lock, [this] { return impl_->stopped; });
}

}  // namespace hs
