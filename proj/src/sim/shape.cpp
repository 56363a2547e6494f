#include "ert/sim/shape.hpp"

#include <array>
#include <cmath>
#include <mutex>
#include <numbers>

namespace ert::sim {

namespace {

bool in_star(Vec2 p) {
  // Five-pointed star, outer radius 0.5, inner 0.2, one tip pointing up.
  const double r = norm(p);
  if (r > 0.5) return false;
  if (r < 0.2 * std::cos(std::numbers::pi / 5.0)) return true;
  const double a = std::atan2(p.x, -p.y);  // 0 at the upward tip
  const double sector = 2.0 * std::numbers::pi / 5.0;
  double t = std::fmod(a, sector);
  if (t < 0) t += sector;
  if (t > sector / 2.0) t = sector - t;
  // Edge from the tip (0.5, angle 0) to the inner vertex (0.2, sector/2).
  const Vec2 tip{0.0, 0.5};
  const Vec2 inner{0.2 * std::sin(sector / 2.0), 0.2 * std::cos(sector / 2.0)};
  const Vec2 q{r * std::sin(t), r * std::cos(t)};
  const double side_q = cross(inner - tip, q - tip);
  const double side_o = cross(inner - tip, Vec2{0.0, 0.0} - tip);
  return side_q * side_o >= 0.0;
}

bool in_letter_r(Vec2 p, bool fill_hole) {
  const double u = p.x, v = p.y;
  if (u >= -0.4 && u <= -0.18 && v >= -0.5 && v <= 0.5) return true;  // stem
  if (u >= -0.4 && u <= 0.32 && v >= -0.5 && v <= 0.04) {                // bowl of the R
    const bool hole = u > -0.18 && u < 0.1 && v > -0.3 && v < -0.14;
    return fill_hole || !hole;
  }
  if (v >= 0.0 && segment_distance(p, {-0.05, 0.04}, {0.38, 0.5}) <= 0.11) return true;  // leg
  return false;
}

bool in_letter_v(Vec2 p) {
  return segment_distance(p, {-0.42, -0.5}, {0.0, 0.5}) <= 0.12 ||
         segment_distance(p, {0.42, -0.5}, {0.0, 0.5}) <= 0.12;
}

bool in_triangle(Vec2 p, Vec2 a, Vec2 b, Vec2 c) {
  const double d1 = cross(b - a, p - a);
  const double d2 = cross(c - b, p - b);
  const double d3 = cross(a - c, p - c);
  const bool neg = d1 < 0 || d2 < 0 || d3 < 0;
  const bool pos = d1 > 0 || d2 > 0 || d3 > 0;
  return !(neg && pos);
}

bool in_letter_v_hull(Vec2 p) {
  const Vec2 a{-0.42, -0.5}, b{0.42, -0.5}, c{0.0, 0.5};
  return in_triangle(p, a, b, c) || segment_distance(p, a, b) <= 0.12 || segment_distance(p, b, c) <= 0.12 ||
         segment_distance(p, c, a) <= 0.12;
}

bool in_hexagon(Vec2 p) {
  const double au = std::abs(p.x), av = std::abs(p.y);
  return av <= 0.433 && std::sqrt(3.0) * au + av <= 0.866;
}

bool in_pan_disc(Vec2 p, double r_in, double r_out) {
  const double r = norm(p - Vec2{-0.1, 0.0});
  return r >= r_in && r <= r_out;
}

bool raw_stencil(ObjectKind k, Vec2 p) {
  const double au = std::abs(p.x), av = std::abs(p.y);
  switch (k) {
    case ObjectKind::block: return au <= 0.4 && av <= 0.4;
    case ObjectKind::star: return in_star(p);
    case ObjectKind::letter_r: return in_letter_r(p, false);
    case ObjectKind::letter_v: return in_letter_v(p);
    case ObjectKind::hexagon: return in_hexagon(p);
    case ObjectKind::container: {
      const double m = std::max(au, av);
      return m >= 0.32 && m <= 0.5;
    }
    case ObjectKind::pan:
      return in_pan_disc(p, 0.28, 0.42) || (p.x >= 0.28 && p.x <= 0.5 && av <= 0.07);
    case ObjectKind::bowl: {
      const double r = norm(p);
      return r >= 0.3 && r <= 0.5;
    }
    case ObjectKind::pallet:
      return au <= 0.5 && av <= 0.34 && !(au < 0.36 && av < 0.2);
    case ObjectKind::frame3:
      return au <= 0.5 && av <= 0.5 && !(au < 0.4 && p.y > -0.4);
    case ObjectKind::line: return au <= 0.5 && av <= 0.05;
  }
  return false;
}

bool raw_footprint(ObjectKind k, Vec2 p) {
  const double au = std::abs(p.x), av = std::abs(p.y);
  switch (k) {
    case ObjectKind::letter_r: return in_letter_r(p, true);
    case ObjectKind::letter_v: return in_letter_v_hull(p);
    case ObjectKind::container: return au <= 0.5 && av <= 0.5;
    case ObjectKind::pan: return in_pan_disc(p, 0.0, 0.42) || (p.x >= 0.28 && p.x <= 0.5 && av <= 0.07);
    case ObjectKind::bowl: return norm(p) <= 0.5;
    case ObjectKind::pallet: return au <= 0.5 && av <= 0.34;
    default: return raw_stencil(k, p);
  }
}

struct KindTables {
  Vec2 centroid;
  double area = 0.0;
  double radius = 0.0;
  std::vector<Vec2> samples;
};

// Raw stencils may reach slightly outside the unit box (letter strokes), so
// the tables cover [-0.75, 0.75]^2.
constexpr int kTableRes = 600;
constexpr double kTableHalf = 0.75;

KindTables build(ObjectKind k) {
  KindTables t;
  const double step = 2.0 * kTableHalf / kTableRes;
  double sx = 0.0, sy = 0.0;
  long count = 0;
  for (int j = 0; j < kTableRes; ++j) {
    for (int i = 0; i < kTableRes; ++i) {
      const Vec2 p{-kTableHalf + (i + 0.5) * step, -kTableHalf + (j + 0.5) * step};
      if (raw_stencil(k, p)) {
        sx += p.x;
        sy += p.y;
        ++count;
      }
    }
  }
  t.centroid = {sx / static_cast<double>(count), sy / static_cast<double>(count)};
  t.area = static_cast<double>(count) * step * step;
  // Footprint samples every fourth lattice point (0.01 box units apart).
  for (int j = 0; j < kTableRes; ++j) {
    for (int i = 0; i < kTableRes; ++i) {
      const Vec2 p{-kTableHalf + (i + 0.5) * step, -kTableHalf + (j + 0.5) * step};
      if (!raw_footprint(k, p)) continue;
      const Vec2 q = p - t.centroid;
      t.radius = std::max(t.radius, norm(q) + step);
      if (i % 4 == 0 && j % 4 == 0) t.samples.push_back(q);
    }
  }
  return t;
}

const KindTables& tables(ObjectKind k) {
  static std::array<KindTables, kKindCount> all;
  static std::once_flag once;
  std::call_once(once, [] {
    for (int i = 0; i < kKindCount; ++i) all[static_cast<std::size_t>(i)] = build(static_cast<ObjectKind>(i));
  });
  return all[static_cast<std::size_t>(k)];
}

}  // namespace

bool stencil_contains(ObjectKind k, Vec2 local) { return raw_stencil(k, local + tables(k).centroid); }
bool footprint_contains(ObjectKind k, Vec2 local) { return raw_footprint(k, local + tables(k).centroid); }
double stencil_area(ObjectKind k) { return tables(k).area; }
double footprint_radius(ObjectKind k) { return tables(k).radius; }
const std::vector<Vec2>& footprint_samples(ObjectKind k) { return tables(k).samples; }
Vec2 stencil_centroid_offset(ObjectKind k) { return tables(k).centroid; }

std::vector<unsigned char> canonical_mask(ObjectKind k, int res) {
  std::vector<unsigned char> out(static_cast<std::size_t>(res) * static_cast<std::size_t>(res), 0);
  for (int j = 0; j < res; ++j)
    for (int i = 0; i < res; ++i) {
      const Vec2 p{-0.5 + (i + 0.5) / res, -0.5 + (j + 0.5) / res};
      out[static_cast<std::size_t>(j) * static_cast<std::size_t>(res) + static_cast<std::size_t>(i)] =
          raw_stencil(k, p) ? 1 : 0;
    }
  return out;
}

}  // namespace ert::sim
