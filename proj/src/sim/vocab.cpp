#include "ert/sim/vocab.hpp"

#include <numbers>

namespace ert::sim {

namespace {

constexpr std::array<KindInfo, kKindCount> kKinds{{
    {ObjectKind::block, "block", "block", "blocks", false},
    {ObjectKind::star, "star", "star", "stars", false},
    {ObjectKind::letter_r, "letter_r", "letter R", "letter Rs", false},
    {ObjectKind::letter_v, "letter_v", "letter V", "letter Vs", false},
    {ObjectKind::hexagon, "hexagon", "hexagon", "hexagons", false},
    {ObjectKind::container, "container", "container", "containers", true},
    {ObjectKind::pan, "pan", "pan", "pans", true},
    {ObjectKind::bowl, "bowl", "bowl", "bowls", true},
    {ObjectKind::pallet, "pallet", "pallet", "pallets", true},
    {ObjectKind::frame3, "frame3", "frame", "frames", false},
    {ObjectKind::line, "line", "line", "lines", false},
}};

// Primaries are pairwise >= 48 apart per channel (L-infinity) and the
// expected appearances (pattern-weighted means) sit on a lattice with
// spacing >= 70, so nearest-appearance classification has slack.
const std::array<TextureInfo, kTextureCount> kTextures{{
    {TextureId::red, "red", "red", {235, 20, 20}, std::nullopt, Pattern::solid},
    {TextureId::green, "green", "green", {20, 163, 20}, std::nullopt, Pattern::solid},
    {TextureId::blue, "blue", "blue", {20, 92, 235}, std::nullopt, Pattern::solid},
    {TextureId::yellow, "yellow", "yellow", {235, 235, 20}, std::nullopt, Pattern::solid},
    {TextureId::purple, "purple", "purple", {163, 20, 235}, std::nullopt, Pattern::solid},
    {TextureId::orange, "orange", "orange", {235, 163, 20}, std::nullopt, Pattern::solid},
    {TextureId::red_swirl, "red_swirl", "red swirl", {218, 27, 99}, Rgb{108, 13, 85}, Pattern::swirl},
    {TextureId::green_purple_stripe, "green_purple_stripe", "green and purple stripe", {32, 162, 88}, Rgb{152, 22, 238}, Pattern::stripe},
    {TextureId::blue_green_stripe, "blue_green_stripe", "blue and green stripe", {25, 37, 245}, Rgb{15, 147, 81}, Pattern::stripe},
    {TextureId::yellow_purple_polka_dot, "yellow_purple_polka_dot", "yellow and purple polka dot", {179, 218, 44}, Rgb{127, 39, 200}, Pattern::dot},
    {TextureId::green_blue_polka_dot, "green_blue_polka_dot", "green and blue polka dot", {14, 115, 34}, Rgb{34, 40, 223}, Pattern::dot},
    {TextureId::red_yellow_stripe, "red_yellow_stripe", "red and yellow stripe", {230, 81, 87}, Rgb{240, 245, 97}, Pattern::stripe},
}};

}  // namespace

const KindInfo& kind_info(ObjectKind k) { return kKinds[static_cast<std::size_t>(k)]; }
const TextureInfo& texture_info(TextureId t) { return kTextures[static_cast<std::size_t>(t)]; }
std::span<const KindInfo> all_kinds() { return kKinds; }
std::span<const TextureInfo> all_textures() { return kTextures; }

std::optional<ObjectKind> kind_from_name(std::string_view name) {
  for (const auto& k : kKinds)
    if (k.name == name) return k.kind;
  return std::nullopt;
}

std::optional<TextureId> texture_from_name(std::string_view name) {
  for (const auto& t : kTextures)
    if (t.name == name) return t.id;
  return std::nullopt;
}

double secondary_fraction(Pattern p) {
  switch (p) {
    case Pattern::solid: return 0.0;
    case Pattern::stripe: return 0.5;
    case Pattern::swirl: return 0.5;
    case Pattern::dot: return std::numbers::pi * 2.5 * 2.5 / 64.0;
  }
  return 0.0;
}

std::array<double, 3> appearance(TextureId t) {
  const TextureInfo& info = texture_info(t);
  const double f = secondary_fraction(info.pattern);
  std::array<double, 3> out{};
  for (int c = 0; c < 3; ++c) {
    const double p = info.primary[static_cast<std::size_t>(c)];
    const double s = info.secondary ? (*info.secondary)[static_cast<std::size_t>(c)] : p;
    out[static_cast<std::size_t>(c)] = (1.0 - f) * p + f * s;
  }
  return out;
}

bool is_held_out(ObjectKind k) { return k == ObjectKind::hexagon || k == ObjectKind::pallet; }
bool is_held_out(TextureId t) { return t == TextureId::orange || t == TextureId::green_blue_polka_dot; }

bool in_train_split(ObjectKind k, TextureId t) {
  if (is_held_out(k) || is_held_out(t)) return false;
  return (static_cast<int>(k) * 7 + static_cast<int>(t)) % 4 != 0;
}

}  // namespace ert::sim
