#pragma once

#include <cstdint>
#include <deque>
#include <stdexcept>
#include <vector>

#include "hideseek/occupancy.hpp"
#include "hideseek/world.hpp"

namespace hs {

/// One seeker's rendered view: 156 x 156 pixels, channels R, G, B and the
/// self mask, 8 bits each. Row-major, top-left origin (north up),
/// channel-last: byte (row * 156 + col) * 4 + channel.
struct Observation {
  static constexpr int kSize = 156;
  static constexpr int kChannels = 4;
  static constexpr std::size_t kBytes = std::size_t{kSize} * kSize * kChannels;

  std::vector<std::uint8_t> data = std::vector<std::uint8_t>(kBytes, 0);

  std::uint8_t& at(int row, int col, int ch) { return data[(std::size_t(row) * kSize + col) * kChannels + ch]; }
  std::uint8_t at(int row, int col, int ch) const { return data[(std::size_t(row) * kSize + col) * kChannels + ch]; }
  bool operator==(const Observation&) const = default;
};

namespace palette {
constexpr std::uint8_t kUnknown[3] = {0, 0, 0};
constexpr std::uint8_t kFree[3] = {128, 128, 128};
constexpr std::uint8_t kObstacle[3] = {255, 255, 255};
constexpr std::uint8_t kSeeker[3] = {255, 0, 0};
constexpr std::uint8_t kHider[3] = {0, 255, 0};
}  // namespace palette

constexpr int kDiskRadiusPx = 2;

struct PixelPos {
  int row = 0;
  int col = 0;
  bool operator==(const PixelPos&) const = default;
};

/// Pixel containing the world point `p` (clamped to the frame).
PixelPos to_pixel(Vec2 p, double arena_side);

struct RenderOptions {
  bool mask_teammates = false;
};

/// Per-map rendering cache: pixel-to-cell lookup and the static obstacle
/// layer. Rendering itself stays a pure function of (world, seen grid).
class ObservationRenderer {
 public:
  explicit ObservationRenderer(const WorldState& world);

  /// Throws std::out_of_range for an unknown id and std::invalid_argument
  /// for a hider.
  Observation render(const WorldState& world, int seeker_id, const SeenGrid& seen,
                     const RenderOptions& options = {}) const;

 private:
  double arena_side_;
  std::vector<int> cell_of_pixel_;
  std::vector<std::uint8_t> obstacle_pixel_;
};

Observation render_seeker_obs(const WorldState& world, int seeker_id, const SeenGrid& seen,
                              const RenderOptions& options = {});

/// Last N observations of one seeker, oldest first. The first push fills
/// the whole stack with copies of that frame.
class FrameStack {
 public:
  explicit FrameStack(int n = 5);

  void push(const Observation& obs);
  int capacity() const { return n_; }
  bool empty() const { return frames_.empty(); }
  const std::deque<Observation>& frames() const { return frames_; }
  /// Concatenated N x 156 x 156 x 4 tensor.
  std::vector<std::uint8_t> stacked() const;

 private:
  int n_;
  std::deque<Observation> frames_;
};

inline FrameStack& push_frame(FrameStack& stack, const Observation& obs) {
  stack.push(obs);
  return stack;
}

}  // namespace hs
