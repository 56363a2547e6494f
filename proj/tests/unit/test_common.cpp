#include <doctest.h>

#include <cmath>
#include <set>

#include "ert/common/codec.hpp"
#include "ert/common/error.hpp"
#include "ert/common/frame.hpp"
#include "ert/common/geometry.hpp"
#include "ert/common/rng.hpp"

using namespace ert;

TEST_CASE("rng streams are reproducible and independent") {
  Rng a(42), b(42), c(43);
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    (void)c;
  }
  CHECK(seed_for(1, "noise") == seed_for(1, "noise"));
  CHECK(seed_for(1, "noise") != seed_for(1, "blur"));
  CHECK(seed_for(1, "x", 0) != seed_for(1, "x", 1));
}

TEST_CASE("uniform helpers stay in range") {
  Rng r(7);
  std::set<int> seen;
  for (int i = 0; i < 5000; ++i) {
    const double u = r.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const int k = r.uniform_int(-2, 3);
    CHECK(k >= -2);
    CHECK(k <= 3);
    seen.insert(k);
  }
  CHECK(seen.size() == 6);
}

TEST_CASE("normal has roughly the requested moments") {
  Rng r(11);
  double s = 0, s2 = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal(3.0, 2.0);
    s += z;
    s2 += z * z;
  }
  const double mean = s / n;
  const double var = s2 / n - mean * mean;
  CHECK(mean == doctest::Approx(3.0).epsilon(0.01));
  CHECK(std::sqrt(var) == doctest::Approx(2.0).epsilon(0.01));
}

TEST_CASE("wrap_angle maps into [-pi, pi)") {
  for (double a : {-10.0, -M_PI, 0.0, M_PI, 3.5, 100.0}) {
    const double w = wrap_angle(a);
    CHECK(w >= -M_PI);
    CHECK(w < M_PI);
    CHECK(std::cos(w) == doctest::Approx(std::cos(a)));
  }
  CHECK(wrap_angle(M_PI) == doctest::Approx(-M_PI));
}

TEST_CASE("base64 round trip") {
  for (std::size_t len = 0; len < 20; ++len) {
    Bytes data(len);
    for (std::size_t i = 0; i < len; ++i) data[i] = static_cast<std::uint8_t>(i * 37 + 5);
    CHECK(base64_decode(base64_encode(data)) == data);
  }
  CHECK(base64_encode(Bytes{'M', 'a', 'n'}) == "TWFu");
  CHECK_THROWS_AS(base64_decode("abc"), ParseError);
  CHECK_THROWS_AS(base64_decode("ab!d"), ParseError);
}

TEST_CASE("frame png round trip is lossless") {
  Frame f = Frame::blank();
  for (int y = 0; y < f.height; ++y)
    for (int x = 0; x < f.width; ++x) {
      f.pixel(x, y)[0] = static_cast<std::uint8_t>(x);
      f.pixel(x, y)[1] = static_cast<std::uint8_t>(y * 2);
      f.pixel(x, y)[2] = static_cast<std::uint8_t>(x ^ y);
      f.label(x, y) = static_cast<std::uint8_t>((x / 32) % 5);
    }
  const Frame g = decode_frame(encode_frame_rgb(f), encode_frame_seg(f));
  CHECK(g == f);
  CHECK(encode_frame_rgb(f) == encode_frame_rgb(f));
  CHECK_THROWS_AS(decode_png(Bytes{1, 2, 3}), ParseError);
}
