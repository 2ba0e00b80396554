#include "hideseek/clone_policy.hpp"

#include <cmath>
#include <limits>
#include <thread>

#include "hideseek/observation.hpp"

namespace hs {

namespace {

constexpr int N = Observation::kSize;
constexpr int C = Observation::kChannels;

Vec2 pixel_center(double row, double col, double arena_side) {
  const double mpp = arena_side / N;
  return {(col + 0.5) * mpp, arena_side - (row + 0.5) * mpp};
}

void check_shape(const PolicyRequest& r, int expected_n) {
  const auto& h = r.header;
  if (h.h != N || h.w != N || h.c != C)
    throw ShapeError("expected frames of 156x156x4, got " + std::to_string(h.h) + "x" +
                     std::to_string(h.w) + "x" + std::to_string(h.c));
  if (expected_n > 0 && h.n != expected_n)
    throw ShapeError("expected a stack of " + std::to_string(expected_n) + " frames, got " +
                     std::to_string(h.n));
}

}  // namespace

DecodedFrame decode_frame(std::span<const std::uint8_t> frame, double arena_side) {
  auto px = [&](int row, int col, int ch) { return frame[(std::size_t(row) * N + col) * C + ch]; };
  DecodedFrame out;
  double mr = 0, mc = 0;
  int mn = 0;
  for (int r = 0; r < N; ++r)
    for (int c = 0; c < N; ++c)
      if (px(r, c, 3)) {
        mr += r;
        mc += c;
        ++mn;
      }
  if (mn == 0) throw ProtocolError("frame has no self mask");
  out.self = pixel_center(mr / mn, mc / mn, arena_side);

  std::vector<std::uint8_t> done(std::size_t(N) * N, 0);
  std::vector<int> stack;
  const auto green = [&](int r, int c) { return px(r, c, 0) == 0 && px(r, c, 1) == 255 && px(r, c, 2) == 0; };
  for (int r = 0; r < N; ++r) {
    for (int c = 0; c < N; ++c) {
      if (done[r * N + c] || !green(r, c)) continue;
      double sr = 0, sc = 0;
      int count = 0;
      stack.assign(1, r * N + c);
      done[r * N + c] = 1;
      while (!stack.empty()) {
        const int i = stack.back();
        stack.pop_back();
        const int ir = i / N, ic = i % N;
        sr += ir;
        sc += ic;
        ++count;
        for (auto [dr, dc] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
          const int nr = ir + dr, nc = ic + dc;
          if (nr < 0 || nc < 0 || nr >= N || nc >= N || done[nr * N + nc] || !green(nr, nc)) continue;
          done[nr * N + nc] = 1;
          stack.push_back(nr * N + nc);
        }
      }
      out.hiders.push_back(pixel_center(sr / count, sc / count, arena_side));
      out.hider_pixels.push_back(count);
    }
  }

  double best = std::numeric_limits<double>::infinity();
  for (int r = 0; r < N; ++r) {
    for (int c = 0; c < N; ++c) {
      if (px(r, c, 0) || px(r, c, 1) || px(r, c, 2)) continue;
      const Vec2 p = pixel_center(r, c, arena_side);
      const double d = norm_sq(p - out.self);
      if (d < best) {
        best = d;
        out.nearest_unknown = p;
      }
    }
  }
  return out;
}

Action heuristic_clone_action(const PolicyRequest& request, double arena_side) {
  const std::size_t frame_bytes = std::size_t(N) * N * C;
  const auto newest = std::span(request.tensor).subspan(request.tensor.size() - frame_bytes, frame_bytes);
  const DecodedFrame f = decode_frame(newest, arena_side);
  Vec2 target = f.self;
  double best = std::numeric_limits<double>::infinity();
  for (const Vec2 h : f.hiders) {
    const double d = distance(h, f.self);
    if (d < best) {
      best = d;
      target = h;
    }
  }
  if (f.hiders.empty() && f.nearest_unknown) target = *f.nearest_unknown;
  const Vec2 d = target - f.self;
  const double o = norm_sq(d) > 0 ? std::atan2(d.y, d.x) : 0.0;
  return encode_action(target, o, arena_side);
}

PolicyHandler echo_handler(Action action) {
  return [action](const PolicyRequest&) { return action; };
}

PolicyHandler clone_handler(double arena_side, int expected_n) {
  return [arena_side, expected_n](const PolicyRequest& r) {
    check_shape(r, expected_n);
    return heuristic_clone_action(r, arena_side);
  };
}

PolicyHandler sleep_handler(std::chrono::milliseconds delay, Action action) {
  return [delay, action](const PolicyRequest&) {
    std::this_thread::sleep_for(delay);
    return action;
  };
}

}  // namespace hs
