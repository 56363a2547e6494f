#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace ert {

using Rgb = std::array<std::uint8_t, 3>;

inline constexpr int kFrameWidth = 256;
inline constexpr int kFrameHeight = 128;
inline constexpr Rgb kTableColor{40, 40, 40};

// Rendered observation. rgb is row-major interleaved (H*W*3), seg is row-major
// (H*W) object ids with 0 reserved for the table.
struct Frame {
  int width = kFrameWidth;
  int height = kFrameHeight;
  std::vector<std::uint8_t> rgb;
  std::vector<std::uint8_t> seg;

  static Frame blank(int width = kFrameWidth, int height = kFrameHeight);

  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x);
  }
  std::uint8_t* pixel(int x, int y) { return rgb.data() + 3 * index(x, y); }
  const std::uint8_t* pixel(int x, int y) const { return rgb.data() + 3 * index(x, y); }
  std::uint8_t& label(int x, int y) { return seg[index(x, y)]; }
  std::uint8_t label(int x, int y) const { return seg[index(x, y)]; }

  bool valid() const;

  friend bool operator==(const Frame&, const Frame&) = default;
};

}  // namespace ert
