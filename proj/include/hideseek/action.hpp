#pragma once

#include <cmath>

#include "hideseek/geometry.hpp"

namespace hs {

/// Normalized action (x^, y^, sin o, cos o); positions map [0, A] to [-1, 1].
struct Action {
  double x = 0.0;
  double y = 0.0;
  double sin_o = 0.0;
  double cos_o = 1.0;
  bool operator==(const Action&) const = default;
};

inline Action encode_action(Vec2 position, double orientation, double arena_side) {
  return {2.0 * position.x / arena_side - 1.0, 2.0 * position.y / arena_side - 1.0,
          std::sin(orientation), std::cos(orientation)};
}

inline Vec2 action_position(const Action& a, double arena_side) {
  return {(a.x + 1.0) * arena_side / 2.0, (a.y + 1.0) * arena_side / 2.0};
}

inline double action_orientation(const Action& a) { return std::atan2(a.sin_o, a.cos_o); }

}  // namespace hs
