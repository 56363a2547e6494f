#include "ert/common/frame.hpp"

namespace ert {

Frame Frame::blank(int width, int height) {
  Frame f;
  f.width = width;
  f.height = height;
  const std::size_t n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  f.rgb.resize(3 * n);
  for (std::size_t i = 0; i < n; ++i) {
    f.rgb[3 * i + 0] = kTableColor[0];
    f.rgb[3 * i + 1] = kTableColor[1];
    f.rgb[3 * i + 2] = kTableColor[2];
  }
  f.seg.assign(n, 0);
  return f;
}

bool Frame::valid() const {
  if (width <= 0 || height <= 0) return false;
  const std::size_t n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  return rgb.size() == 3 * n && seg.size() == n;
}

}  // namespace ert
