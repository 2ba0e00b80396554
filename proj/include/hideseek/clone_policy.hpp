#pragma once

#include <chrono>
#include <span>
#include <vector>

#include "hideseek/action.hpp"
#include "hideseek/bridge.hpp"

namespace hs {

/// What a policy can read back from one rendered frame.
struct DecodedFrame {
  Vec2 self;                 // center of the mask block
  std::vector<Vec2> hiders;  // centroids of green blobs
  std::vector<int> hider_pixels;
  std::optional<Vec2> nearest_unknown;
};

DecodedFrame decode_frame(std::span<const std::uint8_t> frame, double arena_side);

/// Re-implements the seeker heuristic from pixels alone: chase the nearest
/// green blob, otherwise go to the nearest unknown pixel. Used to check the
/// bridge end to end against the builtin heuristic.
Action heuristic_clone_action(const PolicyRequest& request, double arena_side);

/// Handlers for PolicyServer. `expected_n` of 0 accepts any stack depth.
PolicyHandler echo_handler(Action action);
PolicyHandler clone_handler(double arena_side, int expected_n = 0);
PolicyHandler sleep_handler(std::chrono::milliseconds delay, Action action);

}  // namespace hs
