#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ert/common/frame.hpp"
#include "ert/common/geometry.hpp"
#include "ert/common/rng.hpp"

namespace ert::percept {

enum class Category { image_quality, transform, object_addition };
enum class PerceptKind { blurring, noising, filtering, translation, rotation, cropping, distortion, add_rgb, add_seg };

std::string_view to_string(Category c);
std::string_view to_string(PerceptKind k);
std::optional<PerceptKind> percept_kind_from_string(std::string_view s);
Category category_of(PerceptKind k);
const std::vector<PerceptKind>& all_percept_kinds();

struct PixelRect {
  int x = 0, y = 0, w = 0, h = 0;
  friend bool operator==(const PixelRect&, const PixelRect&) = default;
};

// Attack magnitudes plus optional forced draws. A forced value replaces the
// corresponding random draw, which tests use to pin an operator down.
struct PerceptParams {
  int blur_kernel = 11;
  double noise_std = 25.0;
  double translate_frac = 0.05;
  double rotate_deg = 2.0;
  double crop_frac = 0.02;
  double distort_frac = 0.02;
  double add_min_frac = 0.1;
  double add_max_frac = 0.3;

  std::optional<int> channel;                 // filtering
  std::optional<Vec2> shift_px;               // translation
  std::optional<double> angle_deg;            // rotation
  std::optional<std::array<double, 4>> crop;  // left, top, right, bottom in px
  std::optional<std::array<Vec2, 4>> corners; // distortion: TL, TR, BR, BL destinations in px
  std::optional<PixelRect> rect;              // add_rgb / add_seg
  std::optional<int> label;                   // add_seg

  // Gaussian sigma implied by the kernel size.
  double blur_sigma() const { return 0.3 * ((blur_kernel - 1) / 2.0 - 1.0) + 0.8; }
};

struct PerceptionAttackSpec {
  PerceptKind kind = PerceptKind::blurring;
  PerceptParams params;
  std::uint64_t seed = 0;

  Category category() const { return category_of(kind); }
  // Throws ConfigError for out-of-range magnitudes or forced values.
  void validate() const;
};

Frame apply_image_quality(const Frame& frame, const PerceptionAttackSpec& spec, Rng& rng);
Frame apply_transform(const Frame& frame, const PerceptionAttackSpec& spec, Rng& rng);
Frame apply_object_addition(const Frame& frame, const PerceptionAttackSpec& spec, Rng& rng);

Frame apply_perception_attack(const Frame& frame, const PerceptionAttackSpec& spec, Rng& rng);
// Uses a generator seeded from spec.seed, so the same spec gives the same
// perturbation on every frame of an episode.
Frame apply_perception_attack(const Frame& frame, const PerceptionAttackSpec& spec);

// Projective map taking src[i] to dst[i]. Throws Error when degenerate.
std::array<double, 9> homography(const std::array<Vec2, 4>& src, const std::array<Vec2, 4>& dst);
Vec2 apply_homography(const std::array<double, 9>& h, Vec2 p);

nlohmann::ordered_json to_json(const PerceptionAttackSpec& s);
PerceptionAttackSpec percept_spec_from_json(const nlohmann::json& j);

}  // namespace ert::percept
