#include "ert/sim/render.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ert/sim/shape.hpp"

namespace ert::sim {

namespace {

double pmod(double a, double m) {
  const double r = std::fmod(a, m);
  return r < 0.0 ? r + m : r;
}

bool secondary_at(Pattern p, double lx, double ly) {
  switch (p) {
    case Pattern::solid: return false;
    case Pattern::stripe: return pmod(lx, 6.0) >= 3.0;
    case Pattern::dot: {
      const double dx = pmod(lx, 8.0) - 4.0;
      const double dy = pmod(ly, 8.0) - 4.0;
      return dx * dx + dy * dy <= 2.5 * 2.5;
    }
    case Pattern::swirl: {
      const double s = std::hypot(lx, ly) + 6.0 * std::atan2(ly, lx) / (2.0 * std::numbers::pi);
      return pmod(s, 6.0) >= 3.0;
    }
  }
  return false;
}

}  // namespace

Rgb texture_color(TextureId t, double lx, double ly) {
  const TextureInfo& info = texture_info(t);
  if (info.secondary && secondary_at(info.pattern, lx, ly)) return *info.secondary;
  return info.primary;
}

Frame render(const Scene& scene) {
  Frame f = Frame::blank(scene.width, scene.height);
  for (const auto& o : scene.objects) {
    const double side = side_px(o, scene.width);
    const Vec2 c = to_px(o.pos, scene.width, scene.height);
    const double reach = footprint_radius(o.kind) * side + 1.0;
    const int x0 = std::max(0, static_cast<int>(std::floor(c.x - reach)));
    const int x1 = std::min(scene.width - 1, static_cast<int>(std::ceil(c.x + reach)));
    const int y0 = std::max(0, static_cast<int>(std::floor(c.y - reach)));
    const int y1 = std::min(scene.height - 1, static_cast<int>(std::ceil(c.y + reach)));
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const Vec2 d = rotate(Vec2{x + 0.5, y + 0.5} - c, -o.rot);
        if (!stencil_contains(o.kind, (1.0 / side) * d)) continue;
        const Rgb col = texture_color(o.texture, d.x, d.y);
        std::uint8_t* px = f.pixel(x, y);
        px[0] = col[0];
        px[1] = col[1];
        px[2] = col[2];
        f.label(x, y) = static_cast<std::uint8_t>(o.id);
      }
    }
  }
  return f;
}

}  // namespace ert::sim
