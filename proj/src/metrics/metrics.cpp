#include "ert/metrics/metrics.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>

#include "ert/common/error.hpp"
#include "ert/prompt/parse.hpp"

namespace ert::metrics {

namespace {

// Separable valid-mode filtering of a single-channel plane.
std::vector<double> filter_valid(const std::vector<double>& src, int w, int h, const std::vector<double>& k1d) {
  const int n = static_cast<int>(k1d.size());
  const int ow = w - n + 1, oh = h - n + 1;
  std::vector<double> tmp(static_cast<std::size_t>(ow) * static_cast<std::size_t>(h));
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < ow; ++x) {
      double acc = 0;
      for (int i = 0; i < n; ++i) acc += k1d[static_cast<std::size_t>(i)] * src[static_cast<std::size_t>(y * w + x + i)];
      tmp[static_cast<std::size_t>(y * ow + x)] = acc;
    }
  std::vector<double> out(static_cast<std::size_t>(ow) * static_cast<std::size_t>(oh));
  for (int y = 0; y < oh; ++y)
    for (int x = 0; x < ow; ++x) {
      double acc = 0;
      for (int i = 0; i < n; ++i) acc += k1d[static_cast<std::size_t>(i)] * tmp[static_cast<std::size_t>((y + i) * ow + x)];
      out[static_cast<std::size_t>(y * ow + x)] = acc;
    }
  return out;
}

std::vector<double> gaussian_1d(const SsimParams& p) {
  std::vector<double> k(static_cast<std::size_t>(p.window));
  const double r = (p.window - 1) / 2.0;
  double s = 0;
  for (int i = 0; i < p.window; ++i) s += k[static_cast<std::size_t>(i)] = std::exp(-0.5 * (i - r) * (i - r) / (p.sigma * p.sigma));
  for (auto& v : k) v /= s;
  return k;
}

}  // namespace

std::vector<double> ssim_window(const SsimParams& params) {
  const auto k = gaussian_1d(params);
  std::vector<double> w;
  for (double a : k)
    for (double b : k) w.push_back(a * b);
  return w;
}

double ssim(const Frame& a, const Frame& b, const SsimParams& p) {
  if (a.width != b.width || a.height != b.height || a.rgb.size() != b.rgb.size())
    throw DimensionMismatch("ssim inputs differ in size");
  if (a.width < p.window || a.height < p.window) throw DimensionMismatch("frame smaller than the ssim window");
  const auto k = gaussian_1d(p);
  const double c1 = (p.k1 * p.dynamic_range) * (p.k1 * p.dynamic_range);
  const double c2 = (p.k2 * p.dynamic_range) * (p.k2 * p.dynamic_range);
  const std::size_t n = static_cast<std::size_t>(a.width) * static_cast<std::size_t>(a.height);

  double total = 0;
  std::size_t count = 0;
  std::vector<double> x(n), y(n), xx(n), yy(n), xy(n);
  for (int c = 0; c < 3; ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = a.rgb[3 * i + static_cast<std::size_t>(c)];
      y[i] = b.rgb[3 * i + static_cast<std::size_t>(c)];
      xx[i] = x[i] * x[i];
      yy[i] = y[i] * y[i];
      xy[i] = x[i] * y[i];
    }
    const auto mx = filter_valid(x, a.width, a.height, k);
    const auto my = filter_valid(y, a.width, a.height, k);
    const auto sxx = filter_valid(xx, a.width, a.height, k);
    const auto syy = filter_valid(yy, a.width, a.height, k);
    const auto sxy = filter_valid(xy, a.width, a.height, k);
    for (std::size_t i = 0; i < mx.size(); ++i) {
      const double vx = sxx[i] - mx[i] * mx[i], vy = syy[i] - my[i] * my[i], cv = sxy[i] - mx[i] * my[i];
      total += ((2 * mx[i] * my[i] + c1) * (2 * cv + c2)) /
               ((mx[i] * mx[i] + my[i] * my[i] + c1) * (vx + vy + c2));
      ++count;
    }
  }
  return total / static_cast<double>(count);
}

ActionEmbedding embed_actions(const std::vector<std::optional<sim::StepAction>>& steps, int k_max) {
  ActionEmbedding e(static_cast<std::size_t>(kEmbeddingStride * k_max), 0.0);
  const std::size_t n = std::min(steps.size(), static_cast<std::size_t>(k_max));
  for (std::size_t i = 0; i < n; ++i) {
    if (!steps[i]) continue;
    const auto& s = *steps[i];
    double* d = e.data() + kEmbeddingStride * i;
    d[0] = s.pick.x;
    d[1] = s.pick.y;
    d[2] = std::cos(s.pick_rot);
    d[3] = std::sin(s.pick_rot);
    d[4] = s.place.x;
    d[5] = s.place.y;
    d[6] = std::cos(s.place_rot);
    d[7] = std::sin(s.place_rot);
  }
  return e;
}

double action_cosine(const ActionEmbedding& a, const ActionEmbedding& b) {
  if (a.size() != b.size()) throw DimensionMismatch("action embeddings differ in length");
  double ab = 0, aa = 0, bb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  if (aa == 0.0 || bb == 0.0) return 0.0;
  return std::clamp(ab / std::sqrt(aa * bb), -1.0, 1.0);
}

std::optional<bool> ParseJudge::same(const std::string& original, const std::string& attacked) {
  if (original == attacked) return true;
  std::optional<prompt::ParsedInstruction> po, pa;
  try {
    po = prompt::parse_prompt(original, table_);
  } catch (const ParseError&) {
  }
  try {
    pa = prompt::parse_prompt(attacked, table_);
  } catch (const ParseError&) {
  }
  if (!po || !pa) return false;
  return *po == *pa;
}

std::string LlmJudge::request(const std::string& original, const std::string& attacked) {
  return std::string(kJudgeTemplate) + "\nInstruction A: " + original + "\nInstruction B: " + attacked;
}

std::optional<bool> LlmJudge::same(const std::string& original, const std::string& attacked) {
  std::string reply;
  try {
    reply = client_.complete(request(original, attacked));
  } catch (const TransportError&) {
    return std::nullopt;
  }
  std::string word;
  for (char ch : reply) {
    if (std::isalpha(static_cast<unsigned char>(ch)))
      word.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(ch))));
    else if (!word.empty())
      break;
  }
  if (word == "YES") return true;
  if (word == "NO") return false;
  return std::nullopt;
}

double success_rate(const std::vector<sim::EpisodeOutcome>& outcomes) {
  if (outcomes.empty()) throw Error("success rate of an empty outcome list");
  std::size_t ok = 0;
  for (const auto& o : outcomes) ok += o.success;
  return 100.0 * static_cast<double>(ok) / static_cast<double>(outcomes.size());
}

std::string format_percent(double pct) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", pct);
  return buf;
}

std::string format_similarity(double sim) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", sim);
  return buf;
}

}  // namespace ert::metrics
