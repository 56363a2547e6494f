#pragma once

#include <array>
#include <optional>
#include <span>
#include <string_view>

#include "ert/common/frame.hpp"

namespace ert::sim {

enum class ObjectKind { block, star, letter_r, letter_v, hexagon, container, pan, bowl, pallet, frame3, line };
inline constexpr int kKindCount = 11;

enum class TextureId {
  red,
  green,
  blue,
  yellow,
  purple,
  orange,
  red_swirl,
  green_purple_stripe,
  blue_green_stripe,
  yellow_purple_polka_dot,
  green_blue_polka_dot,
  red_yellow_stripe,
};
inline constexpr int kTextureCount = 12;

enum class Pattern { solid, stripe, dot, swirl };

struct KindInfo {
  ObjectKind kind;
  std::string_view name;    // identifier, e.g. "letter_r"
  std::string_view noun;    // prompt noun, e.g. "letter R"
  std::string_view plural;  // e.g. "blocks"
  bool is_container;
};

struct TextureInfo {
  TextureId id;
  std::string_view name;    // identifier, e.g. "green_purple_stripe"
  std::string_view phrase;  // prompt adjective phrase, e.g. "green and purple stripe"
  Rgb primary;
  std::optional<Rgb> secondary;
  Pattern pattern;
};

const KindInfo& kind_info(ObjectKind k);
const TextureInfo& texture_info(TextureId t);
std::span<const KindInfo> all_kinds();
std::span<const TextureInfo> all_textures();

std::optional<ObjectKind> kind_from_name(std::string_view name);
std::optional<TextureId> texture_from_name(std::string_view name);

inline bool is_container(ObjectKind k) { return kind_info(k).is_container; }
inline bool is_fixture(ObjectKind k) { return k == ObjectKind::frame3 || k == ObjectKind::line; }

// Fraction of pixels drawn in the secondary colour for an unbounded patch of
// the pattern; 0 for solids.
double secondary_fraction(Pattern p);

// Expected mean colour of a large patch of this texture.
std::array<double, 3> appearance(TextureId t);

// Generalisation splits over (kind, texture) pairs.
bool is_held_out(ObjectKind k);
bool is_held_out(TextureId t);
bool in_train_split(ObjectKind k, TextureId t);  // both seen and pair assigned to training

}  // namespace ert::sim
