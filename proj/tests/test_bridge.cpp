#include <gtest/gtest.h>

#include <atomic>
#include <condition_variable>
#include <mutex>
#include <thread>

#include "hideseek/bridge.hpp"
#include "hideseek/clone_policy.hpp"
#include "hideseek/episode.hpp"
#include "hideseek/policy.hpp"
#include "fixtures.hpp"

using namespace hs;
using namespace std::chrono_literals;

namespace {

std::vector<std::uint8_t> random_bytes(Rng& rng, std::size_t n) {
  std::vector<std::uint8_t> out(n);
  for (auto& b : out) b = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
  return out;
}

std::string random_name(Rng& rng) {
  static const std::string alphabet = "abcdefghijklmnopqrstuvwxyz0123456789-_.\"\\/ ";
  std::string s;
  for (int i = 0, n = static_cast<int>(rng.uniform_int(1, 16)); i < n; ++i)
    s += alphabet[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(alphabet.size()) - 1))];
  return s;
}

std::span<const std::uint8_t> payload_of(const std::vector<std::uint8_t>& framed) {
  return std::span<const std::uint8_t>(framed).subspan(8);
}

}  // namespace

TEST(Wire, RequestRoundTripFuzz) {
  Rng rng(51);
  for (int trial = 0; trial < 1000; ++trial) {
    PolicyRequest r;
    r.header.policy = random_name(rng);
    r.header.agent_id = static_cast<int>(rng.uniform_int(0, 7));
    r.header.n = static_cast<int>(rng.uniform_int(1, 5));
    r.header.h = static_cast<int>(rng.uniform_int(1, 24));
    r.header.w = static_cast<int>(rng.uniform_int(1, 24));
    r.header.c = static_cast<int>(rng.uniform_int(1, 4));
    r.tensor = random_bytes(rng, r.header.tensor_bytes());
    const auto payload = encode_request(r);
    ASSERT_EQ(decode_request(payload), r) << "trial " << trial;
    const auto framed = frame(payload);
    ASSERT_EQ(framed.size(), payload.size() + 8);
    ASSERT_EQ(read_length_prefix(std::span<const std::uint8_t, 8>(framed.data(), 8)), payload.size());
    ASSERT_EQ(decode_request(payload_of(framed)), r);
  }
}

TEST(Wire, FullStackPayloadSize) {
  PolicyRequest r;
  r.header = {"il-long", 2, 5, 156, 156, 4, "u8"};
  r.tensor.assign(r.header.tensor_bytes(), 7);
  ASSERT_EQ(r.tensor.size(), 486720u);
  const auto payload = encode_request(r);
  const std::string header = R"({"policy":"il-long","agent_id":2,"n":5,"h":156,"w":156,"c":4,"dtype":"u8"})";
  EXPECT_EQ(payload.size(), header.size() + 486720u);
  EXPECT_EQ(std::string(payload.begin(), payload.begin() + static_cast<std::ptrdiff_t>(header.size())), header);
  const auto framed = frame(payload);
  const std::uint64_t len = payload.size();
  for (int i = 0; i < 8; ++i) EXPECT_EQ(framed[static_cast<std::size_t>(i)], (len >> (8 * i)) & 0xff);
}

TEST(Wire, MalformedAndMismatchedRequests) {
  PolicyRequest r;
  r.header = {"p", 0, 1, 2, 2, 1, "u8"};
  r.tensor = {1, 2, 3, 4};
  auto payload = encode_request(r);
  auto shorter = payload;
  shorter.pop_back();
  EXPECT_THROW(decode_request(shorter), ShapeError);
  const std::string bad_dims = R"({"policy":"p","agent_id":0,"n":0,"h":2,"w":2,"c":1,"dtype":"u8"})";
  EXPECT_THROW(decode_request(std::vector<std::uint8_t>(bad_dims.begin(), bad_dims.end())), ShapeError);
  const std::vector<std::uint8_t> junk = {'x', 'y'};
  EXPECT_THROW(decode_request(junk), ProtocolError);
  std::vector<std::uint8_t> unterminated(payload.begin(), payload.begin() + 10);
  EXPECT_THROW(decode_request(unterminated), ProtocolError);
  r.tensor.push_back(5);
  EXPECT_THROW(encode_request(r), ShapeError);
}

TEST(Wire, ResponseRoundTripAndErrors) {
  Rng rng(52);
  for (int i = 0; i < 200; ++i) {
    const Action a{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    ASSERT_EQ(decode_response(encode_response(a)), a);
  }
  EXPECT_THROW(decode_response(encode_error_response("shape", "bad n")), ShapeError);
  EXPECT_THROW(decode_response(encode_error_response("protocol", "bad")), ProtocolError);
  const std::string missing = R"({"x":0,"y":0,"sin_o":0})";
  EXPECT_THROW(decode_response(std::vector<std::uint8_t>(missing.begin(), missing.end())), ProtocolError);
}

TEST(Wire, EndpointParsing) {
  const Endpoint e = Endpoint::parse("localhost:7001/il-long");
  EXPECT_EQ(e, (Endpoint{"localhost", 7001, "il-long"}));
  EXPECT_EQ(e.str(), "localhost:7001/il-long");
  EXPECT_THROW(Endpoint::parse("localhost/il"), std::invalid_argument);
  EXPECT_THROW(Endpoint::parse("h:99999/p"), std::invalid_argument);
}

TEST(Remote, EchoMapsToArenaCenterFacingEast) {
  PolicyServer server(echo_handler({0.0, 0.0, 0.0, 1.0}));
  RemoteSeekerPolicy policy(server.endpoint("echo"), 5, 500ms);
  const WorldState w = fixture::world({}, {{10, 10}}, {{20, 20}});
  SeenGrid seen(*w.grid);
  FrameStack stack(5);
  stack.push(render_seeker_obs(w, 0, seen));
  const Waypoint wp = policy.decide({w, w.agent(0), seen, &stack});
  EXPECT_EQ(wp.position, (Vec2{25, 25}));
  ASSERT_TRUE(wp.orientation);
  EXPECT_DOUBLE_EQ(*wp.orientation, 0.0);
}

TEST(Remote, TimeoutAbortsEpisode) {
  PolicyServer server(sleep_handler(400ms, {0, 0, 0, 1}));
  SimConfig config;
  config.world.set_setting({2, 1});
  const auto bindings = bind_team({2, 1}, "slow:1,heuristic:1", {{"slow", server.endpoint("slow")}});
  EpisodeOptions options;
  options.deadline = 50ms;
  const EpisodeResult r = run_episode(config, bindings, 3, nullptr, options);
  EXPECT_EQ(r.outcome, Outcome::Aborted);
  EXPECT_NE(r.error.find("did not answer"), std::string::npos) << r.error;
}

TEST(Remote, UnreachableEndpointAborts) {
  std::uint16_t port;
  {
    PolicyServer probe(echo_handler({}));
    port = probe.port();
  }
  SimConfig config;
  config.world.set_setting({1, 1});
  const auto bindings = bind_team({1, 1}, "gone:1", {{"gone", {"127.0.0.1", port, "gone"}}});
  EXPECT_EQ(run_episode(config, bindings, 1).outcome, Outcome::Aborted);
}

TEST(Remote, ShapeMismatchIsTyped) {
  PolicyServer server(clone_handler(50.0, 3));
  BridgeClient client(server.endpoint("clone"), 500ms);
  const std::vector<std::uint8_t> five(5 * Observation::kBytes, 0);
  EXPECT_THROW(client.query(0, 5, five), ShapeError);
}

TEST(Remote, EightConcurrentConnections) {
  // Every first request waits inside the handler until all eight are there,
  // which only completes if the server serves them at the same time.
  std::mutex mutex;
  std::condition_variable cv;
  int arrived = 0;
  bool all_met = false;
  PolicyServer server([&](const PolicyRequest& r) {
    std::unique_lock lock(mutex);
    if (!all_met && ++arrived == 8) {
      all_met = true;
      cv.notify_all();
    }
    cv.wait_for(lock, 5s, [&] { return all_met; });
    return Action{r.header.agent_id / 10.0, 0, 0, 1};
  });
  std::atomic<int> ok{0};
  std::vector<std::thread> threads;
  for (int k = 0; k < 8; ++k)
    threads.emplace_back([&, k] {
      BridgeClient client(server.endpoint("p"), 10000ms);
      const std::vector<std::uint8_t> obs(Observation::kBytes, static_cast<std::uint8_t>(k));
      for (int i = 0; i < 10; ++i)
        if (client.query(k, 1, obs).x == k / 10.0) ++ok;
    });
  for (auto& t : threads) t.join();
  EXPECT_EQ(ok.load(), 80);
  EXPECT_TRUE(all_met);
}

TEST(Remote, DeterministicServedPolicyKeepsEpisodeHash) {
  PolicyServer server(clone_handler(50.0, 5));
  SimConfig config;
  config.world.set_setting({2, 1});
  config.world.max_time = 15.0;
  const auto bindings = bind_team({2, 1}, "clone:2", {{"clone", server.endpoint("clone")}});
  const EpisodeResult a = run_episode(config, bindings, 8);
  const EpisodeResult b = run_episode(config, bindings, 8);
  ASSERT_NE(a.outcome, Outcome::Aborted) << a.error;
  EXPECT_EQ(a.trajectory_hash, b.trajectory_hash);
}

TEST(Remote, CloneMatchesBuiltinOnChaseStates) {
  PolicyServer server(clone_handler(50.0, 5));
  BridgeClient client(server.endpoint("clone"), 1000ms);
  const double px = 50.0 / Observation::kSize;
  int compared = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 100; seed < 200 && compared < 100; ++seed) {
    SimConfig config;
    EpisodeRunner runner(config, default_bindings(config.world.setting()), seed);
    std::vector<FrameStack> stacks(3, FrameStack(5));
    while (!runner.finished() && compared < 100) {
      const WorldState& w = runner.world();
      for (int id = 0; id < 3 && compared < 100; ++id) {
        SeenGrid seen = runner.seen(id);
        update_seen(seen, w.agent(id).position, w.obstacles, config.world.seeker_range);
        stacks[static_cast<std::size_t>(id)].push(render_seeker_obs(w, id, seen));
        const auto visible = visible_opponents(w, w.agent(id), config.world.seeker_range);
        if (visible.empty()) continue;
        // Only states where every visible hider's disk is drawn intact.
        bool intact = true;
        for (const AgentState* h : visible)
          for (const AgentState& a : w.agents)
            if (a.id != h->id && (a.alive || a.is_seeker()) && distance(a.position, h->position) < 7 * px)
              intact = false;
        if (!intact) continue;
        SeekerMemory memory;
        Rng rng(1);
        const Waypoint builtin = seeker_heuristic(w.agent(id), visible, seen, *w.grid, rng, memory);
        const Action a = client.query(id, 5, stacks[static_cast<std::size_t>(id)].stacked());
        const double gap = distance(action_position(a, 50.0), builtin.position);
        worst = std::max(worst, gap);
        EXPECT_LE(gap, 0.5) << "seed " << seed << " seeker " << id;
        ++compared;
      }
      runner.advance();
    }
  }
  EXPECT_EQ(compared, 100);
  RecordProperty("worst_gap_m", std::to_string(worst));
}

TEST(Binding, TeamSpecs) {
  const EndpointRegistry reg{{"il-long", {"h", 1, "il-long"}}, {"pe-t", {"h", 2, "pe-t"}}};
  const auto b = bind_team({3, 3}, "il-long:2,pe-t:1", reg);
  ASSERT_EQ(b.size(), 6u);
  EXPECT_EQ(b[0].name(), "il-long");
  EXPECT_EQ(b[1].name(), "il-long");
  EXPECT_EQ(b[2].name(), "pe-t");
  for (int i = 0; i < 3; ++i) EXPECT_EQ(b[static_cast<std::size_t>(i)].kind, PolicyKind::Remote);
  for (int i = 3; i < 6; ++i) EXPECT_EQ(b[static_cast<std::size_t>(i)].kind, PolicyKind::HeuristicHider);
  for (int i = 0; i < 6; ++i) EXPECT_EQ(b[static_cast<std::size_t>(i)].agent_id, i);
  EXPECT_EQ(combination_label(b), "il-long:2+pe-t:1");

  const auto h = bind_team({3, 3}, "heuristic:3");
  for (int i = 0; i < 3; ++i) EXPECT_EQ(h[static_cast<std::size_t>(i)].kind, PolicyKind::HeuristicSeeker);
  EXPECT_EQ(h, default_bindings({3, 3}));

  EXPECT_THROW(bind_team({3, 3}, "il-long:1", reg), BindingError);
  EXPECT_THROW(bind_team({3, 3}, "mystery:3", reg), BindingError);
  EXPECT_THROW(bind_team({3, 3}, "il-long:x", reg), BindingError);
}

TEST(Binding, SingleSeekerAssignment) {
  const EndpointRegistry reg{{"il-long", {"h", 1, "il-long"}}};
  auto b = default_bindings({3, 3});
  bind_seeker(b, "seeker1=il-long", reg);
  EXPECT_EQ(b[1].kind, PolicyKind::Remote);
  EXPECT_EQ(b[0].kind, PolicyKind::HeuristicSeeker);
  bind_seeker(b, "seeker1=heuristic", reg);
  EXPECT_EQ(b, default_bindings({3, 3}));
  EXPECT_THROW(bind_seeker(b, "seeker3=il-long", reg), BindingError);
  EXPECT_THROW(bind_seeker(b, "seeker0=nope", reg), BindingError);
  EXPECT_THROW(bind_seeker(b, "hider0=il-long", reg), BindingError);
}

TEST(Binding, ValidationRejectsRemoteHidersAndGaps) {
  auto b = default_bindings({2, 1});
  b[2].kind = PolicyKind::Remote;
  b[2].endpoint = Endpoint{"h", 1, "x"};
  EXPECT_THROW(validate_bindings(b, {2, 1}), BindingError);
  auto short_list = default_bindings({2, 1});
  short_list.pop_back();
  EXPECT_THROW(validate_bindings(short_list, {2, 1}), BindingError);
}
