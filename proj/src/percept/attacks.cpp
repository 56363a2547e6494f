#include "ert/percept/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

#include <Eigen/Dense>

#include "ert/common/error.hpp"

namespace ert::percept {

namespace {

constexpr std::array<std::string_view, 9> kKindNames{"blurring",  "noising",    "filtering", "translation", "rotation",
                                                     "cropping",  "distortion", "add_rgb",   "add_seg"};
constexpr double kPi = 3.14159265358979323846;

std::uint8_t clamp_u8(double v) { return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L)); }

int reflect101(int i, int n) {
  if (n == 1) return 0;
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * n - 2 - i;
  }
  return i;
}

Frame blur(const Frame& in, const PerceptParams& p) {
  const int k = p.blur_kernel, r = k / 2;
  const double sigma = p.blur_sigma();
  std::vector<double> w(static_cast<std::size_t>(k));
  double sum = 0;
  for (int i = 0; i < k; ++i) sum += w[static_cast<std::size_t>(i)] = std::exp(-0.5 * (i - r) * (i - r) / (sigma * sigma));
  for (auto& v : w) v /= sum;

  const int W = in.width, H = in.height;
  std::vector<double> tmp(in.rgb.size());
  for (int y = 0; y < H; ++y)
    for (int x = 0; x < W; ++x)
      for (int c = 0; c < 3; ++c) {
        double acc = 0;
        for (int i = -r; i <= r; ++i) acc += w[static_cast<std::size_t>(i + r)] * in.pixel(reflect101(x + i, W), y)[c];
        tmp[3 * in.index(x, y) + static_cast<std::size_t>(c)] = acc;
      }
  Frame out = in;
  for (int y = 0; y < H; ++y)
    for (int x = 0; x < W; ++x)
      for (int c = 0; c < 3; ++c) {
        double acc = 0;
        for (int i = -r; i <= r; ++i)
          acc += w[static_cast<std::size_t>(i + r)] * tmp[3 * in.index(x, reflect101(y + i, H)) + static_cast<std::size_t>(c)];
        out.pixel(x, y)[c] = clamp_u8(acc);
      }
  return out;
}

// Resamples through an inverse map (output pixel centre -> source point,
// both in pixel-index coordinates).
Frame warp(const Frame& in, const std::function<Vec2(double, double)>& inverse) {
  const int W = in.width, H = in.height;
  Frame out = in;
  for (int y = 0; y < H; ++y)
    for (int x = 0; x < W; ++x) {
      const Vec2 s = inverse(x, y);
      std::uint8_t* dst = out.pixel(x, y);
      if (!(s.x >= -0.5 && s.x < W - 0.5 && s.y >= -0.5 && s.y < H - 0.5)) {
        std::copy(kTableColor.begin(), kTableColor.end(), dst);
        out.label(x, y) = 0;
        continue;
      }
      out.label(x, y) = in.label(std::clamp(static_cast<int>(std::floor(s.x + 0.5)), 0, W - 1),
                                 std::clamp(static_cast<int>(std::floor(s.y + 0.5)), 0, H - 1));
      const double u = std::clamp(s.x, 0.0, W - 1.0), v = std::clamp(s.y, 0.0, H - 1.0);
      const int x0 = std::min(static_cast<int>(u), W - 2 < 0 ? 0 : W - 2);
      const int y0 = std::min(static_cast<int>(v), H - 2 < 0 ? 0 : H - 2);
      const int x1 = std::min(x0 + 1, W - 1), y1 = std::min(y0 + 1, H - 1);
      const double fx = u - x0, fy = v - y0;
      for (int c = 0; c < 3; ++c) {
        const double top = (1 - fx) * in.pixel(x0, y0)[c] + fx * in.pixel(x1, y0)[c];
        const double bot = (1 - fx) * in.pixel(x0, y1)[c] + fx * in.pixel(x1, y1)[c];
        dst[c] = clamp_u8((1 - fy) * top + fy * bot);
      }
    }
  return out;
}

bool near_collinear(Vec2 a, Vec2 b, Vec2 c) { return std::abs(cross(b - a, c - a)) < 1e-6 * (1.0 + norm(b - a) * norm(c - a)); }

bool degenerate(const std::array<Vec2, 4>& q) {
  for (int i = 0; i < 4; ++i)
    if (near_collinear(q[static_cast<std::size_t>(i)], q[static_cast<std::size_t>((i + 1) % 4)],
                       q[static_cast<std::size_t>((i + 2) % 4)]))
      return true;
  return false;
}

}  // namespace

std::string_view to_string(Category c) {
  switch (c) {
    case Category::image_quality: return "image_quality";
    case Category::transform: return "transform";
    case Category::object_addition: return "object_addition";
  }
  return "";
}

std::string_view to_string(PerceptKind k) { return kKindNames[static_cast<std::size_t>(k)]; }

std::optional<PerceptKind> percept_kind_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i)
    if (kKindNames[i] == s) return static_cast<PerceptKind>(i);
  if (s == "blur") return PerceptKind::blurring;
  if (s == "noise") return PerceptKind::noising;
  if (s == "filter") return PerceptKind::filtering;
  if (s == "crop") return PerceptKind::cropping;
  return std::nullopt;
}

Category category_of(PerceptKind k) {
  switch (k) {
    case PerceptKind::blurring:
    case PerceptKind::noising:
    case PerceptKind::filtering: return Category::image_quality;
    case PerceptKind::translation:
    case PerceptKind::rotation:
    case PerceptKind::cropping:
    case PerceptKind::distortion: return Category::transform;
    default: return Category::object_addition;
  }
}

const std::vector<PerceptKind>& all_percept_kinds() {
  static const std::vector<PerceptKind> v{PerceptKind::blurring,  PerceptKind::noising,    PerceptKind::filtering,
                                          PerceptKind::translation, PerceptKind::rotation, PerceptKind::cropping,
                                          PerceptKind::distortion, PerceptKind::add_rgb,   PerceptKind::add_seg};
  return v;
}

void PerceptionAttackSpec::validate() const {
  const auto& p = params;
  auto in01 = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (p.blur_kernel < 3 || p.blur_kernel % 2 == 0) throw ConfigError("blur kernel must be odd and at least 3");
  if (!(p.noise_std >= 0.0)) throw ConfigError("noise std must be non-negative");
  if (!in01(p.translate_frac) || !in01(p.crop_frac) || p.crop_frac >= 0.5 || !in01(p.distort_frac) ||
      p.distort_frac >= 0.5)
    throw ConfigError("geometric fractions out of range");
  if (!(p.rotate_deg >= 0.0 && p.rotate_deg <= 180.0)) throw ConfigError("rotation range out of bounds");
  if (!(p.add_min_frac > 0.0 && p.add_min_frac <= p.add_max_frac && p.add_max_frac <= 1.0))
    throw ConfigError("object addition size range invalid");
  if (p.channel && (*p.channel < 0 || *p.channel > 2)) throw ConfigError("channel must be 0, 1 or 2");
  if (p.label && (*p.label < 1 || *p.label > 255)) throw ConfigError("label must be in 1..255");
  if (p.rect && (p.rect->w < 0 || p.rect->h < 0)) throw ConfigError("rectangle size must be non-negative");
}

Frame apply_image_quality(const Frame& frame, const PerceptionAttackSpec& spec, Rng& rng) {
  const auto& p = spec.params;
  switch (spec.kind) {
    case PerceptKind::blurring: return blur(frame, p);
    case PerceptKind::noising: {
      Frame out = frame;
      for (auto& v : out.rgb) v = clamp_u8(v + rng.normal(0.0, p.noise_std));
      return out;
    }
    case PerceptKind::filtering: {
      const int c = p.channel ? *p.channel : rng.uniform_int(0, 2);
      Frame out = frame;
      for (std::size_t i = static_cast<std::size_t>(c); i < out.rgb.size(); i += 3) out.rgb[i] = 255;
      return out;
    }
    default: throw Error("not an image-quality attack: " + std::string(to_string(spec.kind)));
  }
}

Frame apply_transform(const Frame& frame, const PerceptionAttackSpec& spec, Rng& rng) {
  const auto& p = spec.params;
  const double W = frame.width, H = frame.height;
  switch (spec.kind) {
    case PerceptKind::translation: {
      Vec2 d = p.shift_px ? *p.shift_px
                          : Vec2{rng.uniform(-p.translate_frac * W, p.translate_frac * W),
                                 rng.uniform(-p.translate_frac * H, p.translate_frac * H)};
      d = {std::round(d.x), std::round(d.y)};
      return warp(frame, [d](double x, double y) { return Vec2{x - d.x, y - d.y}; });
    }
    case PerceptKind::rotation: {
      const double deg = p.angle_deg ? *p.angle_deg : rng.uniform(-p.rotate_deg, p.rotate_deg);
      const double t = deg * kPi / 180.0, c = std::cos(t), s = std::sin(t);
      const Vec2 o{(W - 1) / 2.0, (H - 1) / 2.0};
      return warp(frame, [=](double x, double y) {
        const double dx = x - o.x, dy = y - o.y;
        return Vec2{o.x + c * dx + s * dy, o.y - s * dx + c * dy};
      });
    }
    case PerceptKind::cropping: {
      std::array<double, 4> m;
      if (p.crop) {
        m = *p.crop;
      } else {
        m[0] = rng.uniform(0, p.crop_frac * W);
        m[1] = rng.uniform(0, p.crop_frac * H);
        m[2] = rng.uniform(0, p.crop_frac * W);
        m[3] = rng.uniform(0, p.crop_frac * H);
      }
      const double sx = (W - m[0] - m[2]) / W, sy = (H - m[1] - m[3]) / H;
      return warp(frame, [=](double x, double y) {
        return Vec2{m[0] + (x + 0.5) * sx - 0.5, m[1] + (y + 0.5) * sy - 0.5};
      });
    }
    case PerceptKind::distortion: {
      const std::array<Vec2, 4> src{Vec2{-0.5, -0.5}, Vec2{W - 0.5, -0.5}, Vec2{W - 0.5, H - 0.5}, Vec2{-0.5, H - 0.5}};
      std::array<Vec2, 4> dst;
      if (p.corners) {
        dst = *p.corners;
        if (degenerate(dst)) throw Error("distortion corners are degenerate");
      } else {
        const double mx = p.distort_frac * W, my = p.distort_frac * H;
        int tries = 0;
        do {
          if (++tries > 16) throw Error("could not draw non-degenerate distortion corners");
          for (std::size_t i = 0; i < 4; ++i) {
            const double ox = rng.uniform(0, mx), oy = rng.uniform(0, my);
            dst[i] = {src[i].x + (src[i].x < 0 ? ox : -ox), src[i].y + (src[i].y < 0 ? oy : -oy)};
          }
        } while (degenerate(dst));
      }
      const auto inv = homography(dst, src);
      return warp(frame, [&inv](double x, double y) { return apply_homography(inv, {x, y}); });
    }
    default: throw Error("not a transform attack: " + std::string(to_string(spec.kind)));
  }
}

Frame apply_object_addition(const Frame& frame, const PerceptionAttackSpec& spec, Rng& rng) {
  const auto& p = spec.params;
  if (spec.kind != PerceptKind::add_rgb && spec.kind != PerceptKind::add_seg)
    throw Error("not an object-addition attack: " + std::string(to_string(spec.kind)));

  std::vector<int> labels;
  if (spec.kind == PerceptKind::add_seg) {
    const std::set<std::uint8_t> present(frame.seg.begin(), frame.seg.end());
    for (auto l : present)
      if (l != 0) labels.push_back(l);
    if (labels.empty()) throw AttackNotApplicable("segmentation has no object labels to copy");
  }

  PixelRect r;
  if (p.rect) {
    r = *p.rect;
  } else {
    r.h = static_cast<int>(std::lround(rng.uniform(p.add_min_frac, p.add_max_frac) * frame.height));
    r.w = static_cast<int>(std::lround(rng.uniform(p.add_min_frac, p.add_max_frac) * frame.width));
    r.x = rng.uniform_int(0, frame.width - r.w);
    r.y = rng.uniform_int(0, frame.height - r.h);
  }
  const int x0 = std::max(r.x, 0), y0 = std::max(r.y, 0);
  const int x1 = std::min(r.x + r.w, frame.width), y1 = std::min(r.y + r.h, frame.height);

  Frame out = frame;
  if (spec.kind == PerceptKind::add_rgb) {
    for (int y = y0; y < y1; ++y)
      for (int x = x0; x < x1; ++x) std::fill_n(out.pixel(x, y), 3, std::uint8_t{255});
  } else {
    int label;
    if (p.label) {
      label = *p.label;
      if (std::find(labels.begin(), labels.end(), label) == labels.end())
        throw AttackNotApplicable("forced label is not present in the segmentation");
    } else {
      label = labels[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(labels.size()) - 1))];
    }
    for (int y = y0; y < y1; ++y)
      for (int x = x0; x < x1; ++x) out.label(x, y) = static_cast<std::uint8_t>(label);
  }
  return out;
}

Frame apply_perception_attack(const Frame& frame, const PerceptionAttackSpec& spec, Rng& rng) {
  if (!frame.valid()) throw DimensionMismatch("frame buffers do not match its dimensions");
  switch (spec.category()) {
    case Category::image_quality: return apply_image_quality(frame, spec, rng);
    case Category::transform: return apply_transform(frame, spec, rng);
    case Category::object_addition: return apply_object_addition(frame, spec, rng);
  }
  return frame;
}

Frame apply_perception_attack(const Frame& frame, const PerceptionAttackSpec& spec) {
  Rng rng(seed_for(spec.seed, to_string(spec.kind)));
  return apply_perception_attack(frame, spec, rng);
}

std::array<double, 9> homography(const std::array<Vec2, 4>& src, const std::array<Vec2, 4>& dst) {
  Eigen::Matrix<double, 8, 8> A;
  Eigen::Matrix<double, 8, 1> b;
  for (int i = 0; i < 4; ++i) {
    const Vec2 s = src[static_cast<std::size_t>(i)], d = dst[static_cast<std::size_t>(i)];
    A.row(2 * i) << s.x, s.y, 1, 0, 0, 0, -s.x * d.x, -s.y * d.x;
    A.row(2 * i + 1) << 0, 0, 0, s.x, s.y, 1, -s.x * d.y, -s.y * d.y;
    b(2 * i) = d.x;
    b(2 * i + 1) = d.y;
  }
  Eigen::FullPivLU<Eigen::Matrix<double, 8, 8>> lu(A);
  if (!lu.isInvertible()) throw Error("degenerate point correspondence for homography");
  const Eigen::Matrix<double, 8, 1> h = lu.solve(b);
  return {h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), 1.0};
}

Vec2 apply_homography(const std::array<double, 9>& h, Vec2 p) {
  const double w = h[6] * p.x + h[7] * p.y + h[8];
  return {(h[0] * p.x + h[1] * p.y + h[2]) / w, (h[3] * p.x + h[4] * p.y + h[5]) / w};
}

nlohmann::ordered_json to_json(const PerceptionAttackSpec& s) {
  nlohmann::ordered_json j;
  j["family"] = "perception";
  j["kind"] = to_string(s.kind);
  j["category"] = to_string(s.category());
  j["seed"] = s.seed;
  const auto& p = s.params;
  nlohmann::ordered_json pj;
  pj["blur_kernel"] = p.blur_kernel;
  pj["noise_std"] = p.noise_std;
  pj["translate_frac"] = p.translate_frac;
  pj["rotate_deg"] = p.rotate_deg;
  pj["crop_frac"] = p.crop_frac;
  pj["distort_frac"] = p.distort_frac;
  pj["add_min_frac"] = p.add_min_frac;
  pj["add_max_frac"] = p.add_max_frac;
  if (p.channel) pj["channel"] = *p.channel;
  if (p.shift_px) pj["shift_px"] = {p.shift_px->x, p.shift_px->y};
  if (p.angle_deg) pj["angle_deg"] = *p.angle_deg;
  if (p.crop) pj["crop"] = *p.crop;
  if (p.corners) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& c : *p.corners) arr.push_back({c.x, c.y});
    pj["corners"] = arr;
  }
  if (p.rect) pj["rect"] = {p.rect->x, p.rect->y, p.rect->w, p.rect->h};
  if (p.label) pj["label"] = *p.label;
  j["params"] = pj;
  return j;
}

PerceptionAttackSpec percept_spec_from_json(const nlohmann::json& j) {
  PerceptionAttackSpec s;
  try {
    const auto kind = percept_kind_from_string(j.at("kind").get<std::string>());
    if (!kind) throw ConfigError("unknown perception attack: " + j.at("kind").get<std::string>());
    s.kind = *kind;
    s.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("params")) {
      const auto& pj = j.at("params");
      auto& p = s.params;
      p.blur_kernel = pj.value("blur_kernel", p.blur_kernel);
      p.noise_std = pj.value("noise_std", p.noise_std);
      p.translate_frac = pj.value("translate_frac", p.translate_frac);
      p.rotate_deg = pj.value("rotate_deg", p.rotate_deg);
      p.crop_frac = pj.value("crop_frac", p.crop_frac);
      p.distort_frac = pj.value("distort_frac", p.distort_frac);
      p.add_min_frac = pj.value("add_min_frac", p.add_min_frac);
      p.add_max_frac = pj.value("add_max_frac", p.add_max_frac);
      if (pj.contains("channel")) p.channel = pj.at("channel").get<int>();
      if (pj.contains("shift_px")) p.shift_px = Vec2{pj.at("shift_px").at(0).get<double>(), pj.at("shift_px").at(1).get<double>()};
      if (pj.contains("angle_deg")) p.angle_deg = pj.at("angle_deg").get<double>();
      if (pj.contains("crop")) p.crop = pj.at("crop").get<std::array<double, 4>>();
      if (pj.contains("corners")) {
        std::array<Vec2, 4> c;
        for (std::size_t i = 0; i < 4; ++i) c[i] = {pj.at("corners").at(i).at(0).get<double>(), pj.at("corners").at(i).at(1).get<double>()};
        p.corners = c;
      }
      if (pj.contains("rect")) {
        const auto& r = pj.at("rect");
        p.rect = PixelRect{r.at(0).get<int>(), r.at(1).get<int>(), r.at(2).get<int>(), r.at(3).get<int>()};
      }
      if (pj.contains("label")) p.label = pj.at("label").get<int>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad perception attack spec: ") + e.what());
  }
  s.validate();
  return s;
}

}  // namespace ert::percept
