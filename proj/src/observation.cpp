#include "hideseek/observation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hs {

namespace {

constexpr int N = Observation::kSize;

void paint(Observation& obs, int row, int col, const std::uint8_t (&rgb)[3]) {
  if (row < 0 || col < 0 || row >= N || col >= N) return;
  for (int ch = 0; ch < 3; ++ch) obs.at(row, col, ch) = rgb[ch];
}

void disk(Observation& obs, PixelPos c, const std::uint8_t (&rgb)[3]) {
  for (int dr = -kDiskRadiusPx; dr <= kDiskRadiusPx; ++dr)
    for (int dc = -kDiskRadiusPx; dc <= kDiskRadiusPx; ++dc)
      if (dr * dr + dc * dc <= kDiskRadiusPx * kDiskRadiusPx) paint(obs, c.row + dr, c.col + dc, rgb);
}

// Two pixels just outside the disk along the heading (rows grow southward).
void heading_tick(Observation& obs, PixelPos c, double orientation, const std::uint8_t (&rgb)[3]) {
  for (int k = kDiskRadiusPx + 1; k <= kDiskRadiusPx + 2; ++k) {
    const int col = c.col + static_cast<int>(std::lround(k * std::cos(orientation)));
    const int row = c.row - static_cast<int>(std::lround(k * std::sin(orientation)));
    paint(obs, row, col, rgb);
  }
}

}  // namespace

PixelPos to_pixel(Vec2 p, double arena_side) {
  const double mpp = arena_side / N;
  const int col = std::clamp(static_cast<int>(std::floor(p.x / mpp)), 0, N - 1);
  const int row = std::clamp(static_cast<int>(std::floor((arena_side - p.y) / mpp)), 0, N - 1);
  return {row, col};
}

ObservationRenderer::ObservationRenderer(const WorldState& world)
    : arena_side_(world.config.arena_side),
      cell_of_pixel_(std::size_t{N} * N),
      obstacle_pixel_(std::size_t{N} * N, 0) {
  const OccupancyGrid& grid = *world.grid;
  const double mpp = arena_side_ / N;
  for (int row = 0; row < N; ++row) {
    for (int col = 0; col < N; ++col) {
      const Vec2 p{(col + 0.5) * mpp, arena_side_ - (row + 0.5) * mpp};
      const std::size_t i = std::size_t(row) * N + col;
      cell_of_pixel_[i] = grid.cell_at(p);
      for (const Obstacle& o : world.obstacles) {
        if (o.contains(p)) {
          obstacle_pixel_[i] = 1;
          break;
        }
      }
    }
  }
}

Observation ObservationRenderer::render(const WorldState& world, int seeker_id, const SeenGrid& seen,
                                        const RenderOptions& options) const {
  const AgentState& self = world.agent(seeker_id);
  if (!self.is_seeker())
    throw std::invalid_argument("agent " + std::to_string(seeker_id) + " is not a seeker");

  Observation obs;
  for (std::size_t i = 0; i < cell_of_pixel_.size(); ++i) {
    if (!seen.seen(cell_of_pixel_[i])) continue;
    const auto& rgb = obstacle_pixel_[i] ? palette::kObstacle : palette::kFree;
    std::copy(rgb, rgb + 3, obs.data.begin() + static_cast<std::ptrdiff_t>(i * Observation::kChannels));
  }

  for (const AgentState& h : world.agents) {
    if (!h.is_hider() || !h.alive) continue;
    if (!visible(self.position, h.position, world.obstacles, world.config.seeker_range)) continue;
    disk(obs, to_pixel(h.position, arena_side_), palette::kHider);
  }
  for (const AgentState& s : world.agents) {
    if (!s.is_seeker() || (options.mask_teammates && s.id != seeker_id)) continue;
    const PixelPos c = to_pixel(s.position, arena_side_);
    disk(obs, c, palette::kSeeker);
    heading_tick(obs, c, s.orientation, palette::kSeeker);
  }

  const PixelPos me = to_pixel(self.position, arena_side_);
  const int mr = std::clamp(me.row, 1, N - 2), mc = std::clamp(me.col, 1, N - 2);
  for (int dr = -1; dr <= 1; ++dr)
    for (int dc = -1; dc <= 1; ++dc) obs.at(mr + dr, mc + dc, 3) = 1;
  return obs;
}

Observation render_seeker_obs(const WorldState& world, int seeker_id, const SeenGrid& seen,
                              const RenderOptions& options) {
  return ObservationRenderer(world).render(world, seeker_id, seen, options);
}

FrameStack::FrameStack(int n) : n_(n) {
  if (n < 1) throw std::invalid_argument("frame stack size must be at least 1");
}

void FrameStack::push(const Observation& obs) {
  if (frames_.empty()) {
    frames_.assign(static_cast<std::size_t>(n_), obs);
    return;
  }
  frames_.pop_front();
  frames_.push_back(obs);
}

std::vector<std::uint8_t> FrameStack::stacked() const {
  std::vector<std::uint8_t> out;
  out.reserve(frames_.size() * Observation::kBytes);
  for (const Observation& f : frames_) out.insert(out.end(), f.data.begin(), f.data.end());
  return out;
}

}  // namespace hs
