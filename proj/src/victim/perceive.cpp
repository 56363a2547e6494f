#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "ert/sim/shape.hpp"
#include "ert/sim/vocab.hpp"
#include "ert/victim/victim.hpp"

namespace ert::victim {

namespace {

// Stencil lookup over local box coordinates [-kExtent, kExtent]^2.
constexpr double kExtent = 0.8;
constexpr int kRes = 320;
constexpr double kMixSlack = 0.25;

class StencilTable {
 public:
  StencilTable() {
    for (const auto& k : sim::all_kinds()) {
      auto& t = bits_[static_cast<std::size_t>(k.kind)];
      t.resize(kRes * kRes);
      for (int j = 0; j < kRes; ++j)
        for (int i = 0; i < kRes; ++i) {
          const Vec2 p{-kExtent + (i + 0.5) * 2 * kExtent / kRes, -kExtent + (j + 0.5) * 2 * kExtent / kRes};
          const bool in = sim::stencil_contains(k.kind, p);
          t[static_cast<std::size_t>(j * kRes + i)] = in;
          if (in) radius[static_cast<std::size_t>(k.kind)] = std::max(radius[static_cast<std::size_t>(k.kind)], norm(p));
        }
    }
  }
  bool contains(sim::ObjectKind k, Vec2 p) const {
    const int i = static_cast<int>(std::floor((p.x + kExtent) * kRes / (2 * kExtent)));
    const int j = static_cast<int>(std::floor((p.y + kExtent) * kRes / (2 * kExtent)));
    if (i < 0 || j < 0 || i >= kRes || j >= kRes) return false;
    return bits_[static_cast<std::size_t>(k)][static_cast<std::size_t>(j * kRes + i)];
  }

 private:
  std::array<std::vector<bool>, sim::kKindCount> bits_;

 public:
  std::array<double, sim::kKindCount> radius{};  // max stencil distance, box units
};

const StencilTable& stencils() {
  static const StencilTable t;
  return t;
}

// L-inf distance from a mean colour to the colours a texture can average to
// on a small patch: primary/secondary mixes around the pattern's nominal
// secondary fraction.
double texture_distance(const std::array<double, 3>& mean, sim::TextureId t) {
  const auto& info = sim::texture_info(t);
  const Rgb sec = info.secondary.value_or(info.primary);
  const double nominal = sim::secondary_fraction(info.pattern);
  const double lo = std::max(0.0, nominal - kMixSlack), hi = std::min(1.0, nominal + kMixSlack);
  double best = 1e9;
  for (int i = 0; i <= 50; ++i) {
    const double f = lo + (hi - lo) * i / 50.0;
    double d = 0;
    for (std::size_t ch = 0; ch < 3; ++ch) d = std::max(d, std::abs(mean[ch] - ((1 - f) * info.primary[ch] + f * sec[ch])));
    best = std::min(best, d);
  }
  return best;
}

struct Region {
  int label = 0;
  int index = 0;  // component id in the component map
  std::vector<std::pair<int, int>> pixels;
};

// 8-connected components of equal nonzero labels.
std::vector<Region> components(const Frame& f, std::vector<int>& comp) {
  comp.assign(f.seg.size(), -1);
  std::vector<Region> out;
  std::vector<std::pair<int, int>> stack;
  for (int y = 0; y < f.height; ++y)
    for (int x = 0; x < f.width; ++x) {
      const int l = f.label(x, y);
      if (l == 0 || comp[f.index(x, y)] >= 0) continue;
      Region r;
      r.label = l;
      r.index = static_cast<int>(out.size());
      comp[f.index(x, y)] = r.index;
      stack.assign(1, {x, y});
      while (!stack.empty()) {
        const auto [px, py] = stack.back();
        stack.pop_back();
        r.pixels.emplace_back(px, py);
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = px + dx, ny = py + dy;
            if (nx < 0 || ny < 0 || nx >= f.width || ny >= f.height) continue;
            const std::size_t i = f.index(nx, ny);
            if (comp[i] >= 0 || f.seg[i] != l) continue;
            comp[i] = r.index;
            stack.emplace_back(nx, ny);
          }
      }
      out.push_back(std::move(r));
    }
  return out;
}

struct Fit {
  double iou = 0;
  double rot = 0;
  double side = 0;
};

// IoU of the region against a stencil placed at centroid c. Candidate pixels
// covered by another object are treated as hidden rather than missing.
Fit fit_kind(const Frame& f, const std::vector<int>& comp, const Region& r, Vec2 c, sim::ObjectKind k) {
  const auto& st = stencils();
  const double area_k = sim::stencil_area(k);
  const double obs = static_cast<double>(r.pixels.size());
  Fit best;
  for (int ri = 0; ri < 8; ++ri) {
    const double rot = ri * std::numbers::pi / 4.0;
    const double cs = std::cos(-rot), sn = std::sin(-rot);
    double side = std::sqrt(obs / area_k);
    for (int pass = 0; pass < 2; ++pass) {
      const int reach = static_cast<int>(std::ceil(st.radius[static_cast<std::size_t>(k)] * side)) + 2;
      const int bx0 = std::max(0, static_cast<int>(c.x) - reach), bx1 = std::min(f.width - 1, static_cast<int>(c.x) + reach);
      const int by0 = std::max(0, static_cast<int>(c.y) - reach), by1 = std::min(f.height - 1, static_cast<int>(c.y) + reach);
      int inter = 0, cand = 0, hidden = 0;
      for (int y = by0; y <= by1; ++y)
        for (int x = bx0; x <= bx1; ++x) {
          const double dx = x + 0.5 - c.x, dy = y + 0.5 - c.y;
          const Vec2 local{(cs * dx - sn * dy) / side, (sn * dx + cs * dy) / side};
          if (!st.contains(k, local)) continue;
          const std::size_t i = f.index(x, y);
          if (comp[i] == r.index) {
            ++inter;
            ++cand;
          } else if (f.seg[i] != 0) {
            ++hidden;
          } else {
            ++cand;
          }
        }
      if (pass == 0 && hidden > 0) {
        side = std::sqrt((obs + hidden) / area_k);
        continue;
      }
      const double iou = static_cast<double>(inter) / (obs + cand - inter);
      if (iou > best.iou) best = {iou, rot, side};
      break;
    }
  }
  return best;
}

}  // namespace

std::vector<DetectedObject> perceive(const Frame& frame, const VictimConfig& config) {
  std::vector<int> comp;
  const auto regions = components(frame, comp);

  std::vector<DetectedObject> out;
  for (const auto& r : regions) {
    const int label = r.label;
    DetectedObject d;
    d.label = label;
    d.area = static_cast<int>(r.pixels.size());
    Vec2 c;
    for (auto [x, y] : r.pixels) c = c + Vec2{x + 0.5, y + 0.5};
    c = (1.0 / d.area) * c;
    d.centroid = sim::to_norm(c, frame.width, frame.height);

    // Mean colour over the interior, away from the mask boundary.
    std::array<double, 3> sum{0, 0, 0};
    int n = 0;
    auto same = [&](int x, int y) {
      return x >= 0 && y >= 0 && x < frame.width && y < frame.height && comp[frame.index(x, y)] == r.index;
    };
    for (int pass = 0; pass < 2 && n == 0; ++pass)
      for (auto [x, y] : r.pixels) {
        if (pass == 0 && !(same(x - 1, y) && same(x + 1, y) && same(x, y - 1) && same(x, y + 1))) continue;
        for (int ch = 0; ch < 3; ++ch) sum[static_cast<std::size_t>(ch)] += frame.pixel(x, y)[ch];
        ++n;
      }
    for (auto& v : sum) v /= n;
    double best = 1e9;
    for (const auto& t : sim::all_textures()) {
      const double dist = texture_distance(sum, t.id);
      if (dist < best) {
        best = dist;
        d.texture = t.id;
      }
    }
    if (best > config.color_tolerance) d.texture.reset();

    for (const auto& k : sim::all_kinds()) {
      const Fit f = fit_kind(frame, comp, r, c, k.kind);
      if (f.iou > d.confidence) {
        d.confidence = f.iou;
        d.kind = k.kind;
        d.rot = f.rot;
        d.side_px = f.side;
      }
    }
    if (d.confidence < config.shape_match_threshold) d.kind.reset();
    out.push_back(d);
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.label != b.label ? a.label < b.label : a.area > b.area;
  });
  return out;
}

}  // namespace ert::victim
