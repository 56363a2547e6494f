#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "ert/common/frame.hpp"

namespace ert {

using Bytes = std::vector<std::uint8_t>;

std::string base64_encode(const Bytes& data);
Bytes base64_decode(std::string_view text);  // throws ParseError on bad input

// 8-bit PNG encoding. `channels` is 1 (gray) or 3 (RGB).
Bytes encode_png(const std::uint8_t* pixels, int width, int height, int channels);

struct DecodedPng {
  int width = 0;
  int height = 0;
  int channels = 0;
  Bytes pixels;
};
DecodedPng decode_png(const Bytes& png);

Bytes encode_frame_rgb(const Frame& f);
Bytes encode_frame_seg(const Frame& f);
Frame decode_frame(const Bytes& rgb_png, const Bytes& seg_png);

void write_bytes(const std::filesystem::path& path, const Bytes& data);
Bytes read_bytes(const std::filesystem::path& path);
std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace ert
