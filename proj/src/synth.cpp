// SPDX-License-Identifier: Apache-2.0
#include "metaseg/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "metaseg/error.hpp"
#include "metaseg/mst_io.hpp"
#include "metaseg/rng.hpp"

namespace metaseg {
namespace {

constexpr int kSpuriousAttempts = 100;
constexpr int kShapeMinExtent = 4;
constexpr int kShapeMaxExtent = 10;
constexpr int kSpuriousMinExtent = 2;
constexpr int kSpuriousMaxExtent = 5;
constexpr int kSpuriousMargin = 2;
constexpr int kStripeWidth = 2;
constexpr double kTemperatureSpread = 0.3;
constexpr double kSpuriousBadness = 1.0;
constexpr double kBadnessGain = 4.0;
constexpr double kLogitNoise = 0.3;
constexpr double kLogitNoiseClip = 0.9;
constexpr double kBlurWeight = 0.45;

enum class ShapeKind { Rectangle, Ellipse };

struct Shape {
  ShapeKind kind = ShapeKind::Rectangle;
  std::int32_t cls = 0;
  int cy = 0, cx = 0;
  int ry = 0, rx = 0;

  bool contains(int r, int c, int dy = 0, int dx = 0) const {
    const int y = r - (cy + dy);
    const int x = c - (cx + dx);
    if (std::abs(y) > ry || std::abs(x) > rx) return false;
    if (kind == ShapeKind::Rectangle) return true;
    const double ny = y / (ry + 0.5);
    const double nx = x / (rx + 0.5);
    return ny * ny + nx * nx <= 1.0;
  }
};

struct Box {
  int r0, c0, r1, c1;  // inclusive
  bool intersects(const Box& o) const {
    return r0 <= o.r1 && o.r0 <= r1 && c0 <= o.c1 && o.c0 <= c1;
  }
};

Box bounds(const Shape& s, int pad) {
  return {s.cy - s.ry - pad, s.cx - s.rx - pad, s.cy + s.ry + pad, s.cx + s.rx + pad};
}

class Canvas {
 public:
  Canvas(std::size_t h, std::size_t w, double fill_t)
      : h_(static_cast<int>(h)), w_(static_cast<int>(w)),
        cls_(h * w, 0), temp_(h * w, fill_t) {}

  void paint(const Shape& s, int dy, int dx, double t) {
    for (int r = std::max(0, s.cy + dy - s.ry); r <= std::min(h_ - 1, s.cy + dy + s.ry); ++r) {
      for (int c = std::max(0, s.cx + dx - s.rx); c <= std::min(w_ - 1, s.cx + dx + s.rx); ++c) {
        if (s.contains(r, c, dy, dx)) set(r, c, s.cls, t);
      }
    }
  }

  void set(int r, int c, std::int32_t cls, double t) {
    const auto i = static_cast<std::size_t>(r * w_ + c);
    cls_[i] = cls;
    temp_[i] = t;
  }

  bool clear(const Box& b) const {
    for (int r = std::max(0, b.r0); r <= std::min(h_ - 1, b.r1); ++r) {
      for (int c = std::max(0, b.c0); c <= std::min(w_ - 1, b.c1); ++c) {
        if (cls_[static_cast<std::size_t>(r * w_ + c)] != 0) return false;
      }
    }
    return true;
  }

  std::int32_t cls(std::size_t i) const { return cls_[i]; }
  double temperature(std::size_t i) const { return temp_[i]; }
  const std::vector<std::int32_t>& classes() const { return cls_; }

 private:
  int h_, w_;
  std::vector<std::int32_t> cls_;
  std::vector<double> temp_;
};

void check_spec(const SceneSpec& spec) {
  const auto bad = [](const std::string& what) { throw Error(ErrorKind::InvalidArgument, what); };
  if (spec.height < 8 || spec.width < 8) bad("scene must be at least 8x8");
  if (spec.num_classes < 2) bad("need at least two classes");
  if (spec.n_shapes < 0) bad("n_shapes must be >= 0");
  if (!(spec.noise_temperature > 0.0) || !std::isfinite(spec.noise_temperature)) {
    bad("noise_temperature must be > 0");
  }
  if (!(spec.spurious_rate >= 0.0 && spec.spurious_rate <= 1.0)) bad("spurious_rate must be in [0,1]");
  if (!(spec.split_rate >= 0.0 && spec.split_rate <= 1.0)) bad("split_rate must be in [0,1]");
  if (spec.boundary_blur < 0) bad("boundary_blur must be >= 0");
  if (spec.max_shift < 0) bad("max_shift must be >= 0");
}

Shape random_shape(Rng& rng, std::int32_t cls, int lo, int hi) {
  Shape s;
  s.kind = rng.bernoulli(0.5) ? ShapeKind::Rectangle : ShapeKind::Ellipse;
  s.cls = cls;
  s.ry = rng.integer(lo, hi);
  s.rx = rng.integer(lo, hi);
  if (s.kind == ShapeKind::Ellipse) {
    s.ry = std::max(s.ry, lo + 1);
    s.rx = std::max(s.rx, lo + 1);
  }
  return s;
}

bool place(Rng& rng, Shape& s, int h, int w) {
  const int ylo = s.ry, yhi = h - 1 - s.ry;
  const int xlo = s.rx, xhi = w - 1 - s.rx;
  if (ylo > yhi || xlo > xhi) return false;
  s.cy = rng.integer(ylo, yhi);
  s.cx = rng.integer(xlo, xhi);
  return true;
}

// Uniform choice among all centres keeping `s` in the image and `gap` pixels
// clear of every taken box; shrinks the shape when nothing fits.
bool place_clear_of(Rng& rng, Shape& s, int h, int w, const std::vector<Box>& taken, int gap) {
  std::vector<std::pair<int, int>> centres;
  while (true) {
    centres.clear();
    for (int cy = s.ry; cy <= h - 1 - s.ry; ++cy) {
      for (int cx = s.rx; cx <= w - 1 - s.rx; ++cx) {
        s.cy = cy;
        s.cx = cx;
        const Box b = bounds(s, gap);
        if (std::none_of(taken.begin(), taken.end(), [&](const Box& o) { return o.intersects(b); })) {
          centres.emplace_back(cy, cx);
        }
      }
    }
    if (!centres.empty()) break;
    const int floor = s.kind == ShapeKind::Ellipse ? kShapeMinExtent + 1 : kShapeMinExtent;
    if (s.ry <= floor && s.rx <= floor) return false;
    s.ry = std::max(floor, s.ry - 1);
    s.rx = std::max(floor, s.rx - 1);
  }
  const auto& [cy, cx] = centres[static_cast<std::size_t>(rng.index(centres.size()))];
  s.cy = cy;
  s.cx = cx;
  return true;
}

// Intersection over union of a shape with its displaced copy.
double displaced_overlap(const Shape& s, int dy, int dx) {
  std::size_t inter = 0, uni = 0;
  for (int r = s.cy - s.ry - std::abs(dy); r <= s.cy + s.ry + std::abs(dy); ++r) {
    for (int c = s.cx - s.rx - std::abs(dx); c <= s.cx + s.rx + std::abs(dx); ++c) {
      const bool a = s.contains(r, c);
      const bool b = s.contains(r, c, dy, dx);
      inter += a && b;
      uni += a || b;
    }
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

// Per-shape temperature: lognormal spread around the base, inflated by how
// badly the prediction misses.
double shape_temperature(Rng& rng, double base, double badness) {
  return base * std::exp(kTemperatureSpread * rng.normal()) * (1.0 + kBadnessGain * badness);
}

std::vector<double> soften(const Canvas& pred, std::size_t n_pixels, std::size_t q, Rng& rng) {
  std::vector<double> probs(n_pixels * q);
  std::vector<double> logits(q);
  for (std::size_t i = 0; i < n_pixels; ++i) {
    const auto c = static_cast<std::size_t>(pred.cls(i));
    const double t = pred.temperature(i);
    double top = -1e300;
    for (std::size_t j = 0; j < q; ++j) {
      const double noise = std::clamp(kLogitNoise * rng.normal(), -kLogitNoiseClip, kLogitNoiseClip);
      logits[j] = ((j == c ? 1.0 : -1.0) + noise) / t;
      top = std::max(top, logits[j]);
    }
    double z = 0.0;
    for (std::size_t j = 0; j < q; ++j) {
      logits[j] = std::exp(logits[j] - top);
      z += logits[j];
    }
    for (std::size_t j = 0; j < q; ++j) probs[i * q + j] = logits[j] / z;
  }
  return probs;
}

// Mixes distributions near predicted class edges with their neighbourhood
// average. The weight is capped per pixel so the predicted class stays on top.
std::vector<double> blur_edges(const std::vector<double>& base, const Canvas& pred, int h, int w,
                               std::size_t q, int radius) {
  std::vector<double> out = base;
  if (radius == 0) return out;
  std::vector<double> avg(q);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const auto i = static_cast<std::size_t>(r * w + c);
      const std::int32_t own = pred.cls(i);
      bool edge = false;
      std::fill(avg.begin(), avg.end(), 0.0);
      int count = 0;
      for (int rr = std::max(0, r - radius); rr <= std::min(h - 1, r + radius); ++rr) {
        for (int cc = std::max(0, c - radius); cc <= std::min(w - 1, c + radius); ++cc) {
          const auto k = static_cast<std::size_t>(rr * w + cc);
          if (pred.cls(k) != own) edge = true;
          for (std::size_t j = 0; j < q; ++j) avg[j] += base[k * q + j];
          ++count;
        }
      }
      if (!edge) continue;
      for (double& a : avg) a /= count;

      const auto oc = static_cast<std::size_t>(own);
      const double* s = &base[i * q];
      double beta = kBlurWeight;
      for (std::size_t j = 0; j < q; ++j) {
        if (j == oc) continue;
        const double lead = s[oc] - s[j];
        const double pull = avg[j] - avg[oc];
        if (pull > 0.0) beta = std::min(beta, 0.5 * lead / (lead + pull));
      }
      for (std::size_t j = 0; j < q; ++j) out[i * q + j] = (1.0 - beta) * s[j] + beta * avg[j];
    }
  }
  return out;
}

}  // namespace

SyntheticScene generate_scene(const SceneSpec& spec) {
  check_spec(spec);
  Rng rng(spec.seed);
  const int h = static_cast<int>(spec.height);
  const int w = static_cast<int>(spec.width);
  const std::size_t q = spec.num_classes;
  const auto fg_class = [&] { return static_cast<std::int32_t>(rng.integer(1, static_cast<int>(q) - 1)); };

  Canvas gt(spec.height, spec.width, 0.0);
  Canvas pred(spec.height, spec.width, shape_temperature(rng, spec.noise_temperature, 0.0));

  // Ground-truth shapes, separated so that displaced predictions never touch.
  const int gap = 2 * spec.max_shift + 2;
  std::vector<Shape> shapes;
  std::vector<Box> taken;
  for (int k = 0; k < spec.n_shapes; ++k) {
    Shape s = random_shape(rng, fg_class(), kShapeMinExtent, kShapeMaxExtent);
    if (!place_clear_of(rng, s, h, w, taken, gap)) {
      throw Error(ErrorKind::SpecInfeasible,
                  "could not place shape " + std::to_string(k + 1) + " of " +
                      std::to_string(spec.n_shapes) + " in a " + std::to_string(h) + "x" +
                      std::to_string(w) + " scene");
    }
    taken.push_back(bounds(s, 0));
    shapes.push_back(s);
    gt.paint(s, 0, 0, 0.0);
  }

  // Predictions: displaced copies, some cut in two by a background stripe.
  for (const Shape& s : shapes) {
    const int dy = rng.integer(-spec.max_shift, spec.max_shift);
    const int dx = rng.integer(-spec.max_shift, spec.max_shift);
    const double t = shape_temperature(rng, spec.noise_temperature, 1.0 - displaced_overlap(s, dy, dx));
    pred.paint(s, dy, dx, t);

    const bool split = rng.bernoulli(spec.split_rate);
    const bool horizontal = rng.bernoulli(0.5);
    const double offset = rng.uniform(-1.0, 1.0) / 3.0;
    if (!split || std::min(s.ry, s.rx) < 5) continue;
    const int radius = horizontal ? s.ry : s.rx;
    const int start = (horizontal ? s.cy + dy : s.cx + dx) +
                      static_cast<int>(std::lround(offset * radius)) - kStripeWidth / 2;
    for (int a = start; a < start + kStripeWidth; ++a) {
      for (int b = -(horizontal ? s.rx : s.ry); b <= (horizontal ? s.rx : s.ry); ++b) {
        const int r = horizontal ? a : s.cy + dy + b;
        const int c = horizontal ? s.cx + dx + b : a;
        if (r >= 0 && r < h && c >= 0 && c < w) pred.set(r, c, 0, t);
      }
    }
  }

  // Spurious predictions on clear background; their class never occurs in
  // the ground truth underneath, so their IoU is zero by construction.
  SyntheticScene scene;
  for (std::size_t k = 0; k < shapes.size(); ++k) {
    if (!rng.bernoulli(spec.spurious_rate)) continue;
    const std::int32_t cls = rng.bernoulli(0.5) ? static_cast<std::int32_t>(q - 1) : fg_class();
    Shape s = random_shape(rng, cls, kSpuriousMinExtent, kSpuriousMaxExtent);
    const double t = shape_temperature(rng, spec.noise_temperature, kSpuriousBadness);
    for (int attempt = 0; attempt < kSpuriousAttempts; ++attempt) {
      if (!place(rng, s, h, w)) break;
      const Box b = bounds(s, kSpuriousMargin);
      if (gt.clear(b) && pred.clear(b)) {
        pred.paint(s, 0, 0, t);
        scene.injected_false.push_back(
            {static_cast<std::size_t>(s.cy), static_cast<std::size_t>(s.cx), s.cls});
        break;
      }
    }
  }

  const std::size_t n = spec.height * spec.width;
  const std::vector<double> base = soften(pred, n, q, rng);
  const std::vector<double> mixed = blur_edges(base, pred, h, w, q, spec.boundary_blur);

  std::vector<float> values(mixed.size());
  std::transform(mixed.begin(), mixed.end(), values.begin(), [](double v) { return static_cast<float>(v); });
  scene.probs = ProbTensor(spec.height, spec.width, q, std::move(values));
  scene.gt.height = spec.height;
  scene.gt.width = spec.width;
  scene.gt.labels = gt.classes();
  return scene;
}

std::vector<SyntheticScene> generate_corpus(const SceneSpec& spec, std::size_t n_scenes) {
  if (n_scenes == 0) throw Error(ErrorKind::InvalidArgument, "corpus needs at least one scene");
  std::vector<SyntheticScene> scenes;
  scenes.reserve(n_scenes);
  for (std::size_t i = 0; i < n_scenes; ++i) {
    SceneSpec s = spec;
    s.seed = derive_seed(spec.seed, i);
    scenes.push_back(generate_scene(s));
  }
  return scenes;
}

std::vector<SegmentRecord> corpus_records(const std::vector<SyntheticScene>& scenes,
                                          const ImageMetricsOptions& options,
                                          CorpusSummary* summary) {
  std::vector<SegmentRecord> records;
  CorpusSummary sum;
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    ImageMetrics m = compute_image_metrics(scenes[i].probs, scenes[i].gt,
                                           static_cast<std::int64_t>(i), options);
    sum.dropped_empty_interior += m.dropped_empty_interior;
    for (SegmentRecord& r : m.records) {
      (r.iou_adj > 0.0 ? sum.i1 : sum.i0)++;
      records.push_back(std::move(r));
    }
  }
  sum.segments = records.size();
  if (summary) *summary = sum;
  return records;
}

void save_corpus(const std::vector<SyntheticScene>& scenes, const std::filesystem::path& dir,
                 std::string_view comment) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::IoFailure, "cannot create " + dir.string() + ": " + ec.message());

  std::ofstream manifest(dir / "injected_false.csv", std::ios::binary);
  if (!manifest) throw Error(ErrorKind::IoFailure, "cannot write " + (dir / "injected_false.csv").string());
  if (!comment.empty()) manifest << "# " << comment << '\n';
  manifest << "scene,row,col,class\n";

  char name[32];
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    std::snprintf(name, sizeof name, "scene_%04zu", i);
    save_tensor(scenes[i].probs, dir / (std::string(name) + ".probs.mst"));
    save_label_map(scenes[i].gt, dir / (std::string(name) + ".labels.mst"));
    for (const auto& f : scenes[i].injected_false) {
      manifest << name << ',' << f.row << ',' << f.col << ',' << f.cls << '\n';
    }
  }
  if (!manifest) throw Error(ErrorKind::IoFailure, "write failed for injected_false.csv");
}

}  // namespace metaseg
