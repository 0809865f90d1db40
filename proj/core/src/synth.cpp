#include "gaic/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace gaic {

namespace {

constexpr double kPi = 3.14159265358979323846;

int64_t intersection_area(const CropRect& a, const CropRect& b) {
  const int ih = std::max(0, std::min(a.x2, b.x2) - std::max(a.x1, b.x1));
  const int iw = std::max(0, std::min(a.y2, b.y2) - std::max(a.y1, b.y1));
  return static_cast<int64_t>(ih) * iw;
}

inline uint8_t to_byte(double v) {
  return static_cast<uint8_t>(std::clamp(std::lround(v), 0l, 255l));
}

void fill_rect(RawImage& img, const CropRect& r,
               const std::array<uint8_t, 3>& color, double noise_amp,
               Rng& rng) {
  for (int row = r.x1; row < r.x2; ++row)
    for (int col = r.y1; col < r.y2; ++col) {
      uint8_t* px = img.px(row, col);
      const double n = rng.uniform(-noise_amp, noise_amp);
      px[0] = to_byte(color[0] + n);
      px[1] = to_byte(color[1] + n);
      px[2] = to_byte(color[2] + n);
    }
}

}  // namespace

void SynthSceneSpec::validate() const {
  if (canvas.height < 16 || canvas.width < 16)
    throw Error("synth scene: canvas is too small");
  validate_crop(subject, canvas);
  for (const auto& d : distractors) validate_crop(d.rect, canvas);
}

SynthSceneSpec make_scene_spec(Rng& rng) {
  SynthSceneSpec spec;
  spec.seed = rng.next_u64();

  const int h = static_cast<int>(rng.uniform_int(288, 416));
  const double aspect = rng.uniform(0.8, 1.4);
  const int w = std::clamp(static_cast<int>(std::lround(h * aspect)), 288, 560);
  spec.canvas = ImageDims{h, w};

  // Cool, dim background gradient.
  spec.bg_a = {static_cast<uint8_t>(rng.uniform_int(30, 70)),
               static_cast<uint8_t>(rng.uniform_int(50, 90)),
               static_cast<uint8_t>(rng.uniform_int(80, 130))};
  spec.bg_b = {static_cast<uint8_t>(rng.uniform_int(80, 120)),
               static_cast<uint8_t>(rng.uniform_int(100, 140)),
               static_cast<uint8_t>(rng.uniform_int(120, 170))};
  spec.texture_amplitude = rng.uniform(4.0, 9.0);
  spec.texture_wavelength = rng.uniform(19.0, 47.0);
  spec.noise_amplitude = rng.uniform(3.0, 7.0);

  // Warm, bright subject somewhere inside a broad central band.
  const int min_ext = std::min(h, w);
  const int sub_h = static_cast<int>(rng.uniform_int(min_ext / 7, min_ext / 4));
  const int sub_w = static_cast<int>(rng.uniform_int(min_ext / 7, min_ext / 4));
  const int cx = static_cast<int>(
      rng.uniform_int(static_cast<int64_t>(0.22 * h), static_cast<int64_t>(0.78 * h)));
  const int cy = static_cast<int>(
      rng.uniform_int(static_cast<int64_t>(0.22 * w), static_cast<int64_t>(0.78 * w)));
  CropRect sub{cx - sub_h / 2, cy - sub_w / 2, 0, 0};
  sub.x1 = std::clamp(sub.x1, 1, h - sub_h - 1);
  sub.y1 = std::clamp(sub.y1, 1, w - sub_w - 1);
  sub.x2 = sub.x1 + sub_h;
  sub.y2 = sub.y1 + sub_w;
  spec.subject = sub;
  spec.subject_color = {static_cast<uint8_t>(rng.uniform_int(200, 255)),
                        static_cast<uint8_t>(rng.uniform_int(60, 140)),
                        static_cast<uint8_t>(rng.uniform_int(20, 80))};

  // High-contrast blobs inside the border band, clear of the subject.
  const int blobs = static_cast<int>(rng.uniform_int(2, 5));
  const int band_h = std::max(8, static_cast<int>(0.18 * h));
  const int band_w = std::max(8, static_cast<int>(0.18 * w));
  for (int b = 0; b < blobs; ++b) {
    for (int attempt = 0; attempt < 24; ++attempt) {
      const int bh = static_cast<int>(rng.uniform_int(min_ext / 20, min_ext / 9));
      const int bw = static_cast<int>(rng.uniform_int(min_ext / 20, min_ext / 9));
      const int side = static_cast<int>(rng.uniform_int(0, 3));
      int x1, y1;
      switch (side) {
        case 0:  // top band
          x1 = static_cast<int>(rng.uniform_int(0, band_h));
          y1 = static_cast<int>(rng.uniform_int(0, w - bw - 1));
          break;
        case 1:  // bottom band
          x1 = static_cast<int>(rng.uniform_int(h - band_h - bh, h - bh - 1));
          y1 = static_cast<int>(rng.uniform_int(0, w - bw - 1));
          break;
        case 2:  // left band
          x1 = static_cast<int>(rng.uniform_int(0, h - bh - 1));
          y1 = static_cast<int>(rng.uniform_int(0, band_w));
          break;
        default:  // right band
          x1 = static_cast<int>(rng.uniform_int(0, h - bh - 1));
          y1 = static_cast<int>(rng.uniform_int(w - band_w - bw, w - bw - 1));
          break;
      }
      x1 = std::clamp(x1, 0, h - bh - 1);
      y1 = std::clamp(y1, 0, w - bw - 1);
      const CropRect rect{x1, y1, x1 + bh, y1 + bw};
      if (intersection_area(rect, spec.subject) > 0) continue;
      DistractorSpec d;
      d.rect = rect;
      const bool bright = rng.bernoulli(0.5);
      const uint8_t v = bright ? static_cast<uint8_t>(rng.uniform_int(225, 255))
                               : static_cast<uint8_t>(rng.uniform_int(0, 25));
      d.color = {v, v, static_cast<uint8_t>(rng.uniform_int(0, 40))};
      spec.distractors.push_back(d);
      break;
    }
  }
  return spec;
}

RawImage render_scene(const SynthSceneSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  const int h = spec.canvas.height, w = spec.canvas.width;
  RawImage img = make_image(h, w);

  const double phase_r = rng.uniform(0.0, 2.0 * kPi);
  const double phase_c = rng.uniform(0.0, 2.0 * kPi);
  for (int r = 0; r < h; ++r) {
    const double tr = static_cast<double>(r) / (h - 1);
    const double wave_r =
        std::sin(2.0 * kPi * r / spec.texture_wavelength + phase_r);
    for (int c = 0; c < w; ++c) {
      const double tc = static_cast<double>(c) / (w - 1);
      const double t = 0.5 * (tr + tc);
      const double wave =
          spec.texture_amplitude * wave_r *
          std::sin(2.0 * kPi * c / spec.texture_wavelength + phase_c);
      const double noise = rng.uniform(-spec.noise_amplitude,
                                       spec.noise_amplitude);
      uint8_t* px = img.px(r, c);
      for (int ch = 0; ch < 3; ++ch) {
        const double base = spec.bg_a[ch] + t * (spec.bg_b[ch] - spec.bg_a[ch]);
        px[ch] = to_byte(base + wave + noise);
      }
    }
  }

  fill_rect(img, spec.subject, spec.subject_color, spec.noise_amplitude, rng);
  // Thin dark outline keeps the subject readable on bright patches.
  const CropRect s = spec.subject;
  for (int c = s.y1; c < s.y2; ++c) {
    for (int ch = 0; ch < 3; ++ch) {
      img.px(s.x1, c)[ch] = static_cast<uint8_t>(img.px(s.x1, c)[ch] / 3);
      img.px(s.x2 - 1, c)[ch] = static_cast<uint8_t>(img.px(s.x2 - 1, c)[ch] / 3);
    }
  }
  for (int r = s.x1; r < s.x2; ++r) {
    for (int ch = 0; ch < 3; ++ch) {
      img.px(r, s.y1)[ch] = static_cast<uint8_t>(img.px(r, s.y1)[ch] / 3);
      img.px(r, s.y2 - 1)[ch] = static_cast<uint8_t>(img.px(r, s.y2 - 1)[ch] / 3);
    }
  }

  for (const auto& d : spec.distractors)
    fill_rect(img, d.rect, d.color, spec.noise_amplitude, rng);
  return img;
}

double oracle_mos(const SynthSceneSpec& spec, const CropRect& crop,
                  const OracleWeights& weights) {
  spec.validate();
  validate_crop(crop, spec.canvas);

  const double subject_area = static_cast<double>(crop_area(spec.subject));
  const double coverage =
      static_cast<double>(intersection_area(crop, spec.subject)) /
      subject_area;

  double alignment = 0.0;
  const double center_r = 0.5 * (spec.subject.x1 + spec.subject.x2);
  const double center_c = 0.5 * (spec.subject.y1 + spec.subject.y2);
  if (center_r >= crop.x1 && center_r < crop.x2 && center_c >= crop.y1 &&
      center_c < crop.y2) {
    const double v = (center_r - crop.x1) / crop.height();
    const double u = (center_c - crop.y1) / crop.width();
    double best = 2.0;
    for (const double pv : {1.0 / 3.0, 2.0 / 3.0})
      for (const double pu : {1.0 / 3.0, 2.0 / 3.0})
        best = std::min(best, std::hypot(v - pv, u - pu));
    const double max_dist = std::sqrt(2.0) / 3.0;  // corner to intersection
    alignment = std::max(0.0, 1.0 - best / max_dist);
  }

  double distractor_kept = 0.0;
  int64_t distractor_total = 0;
  for (const auto& d : spec.distractors) distractor_total += crop_area(d.rect);
  if (distractor_total > 0) {
    int64_t kept = 0;
    for (const auto& d : spec.distractors)
      kept += intersection_area(crop, d.rect);
    distractor_kept = static_cast<double>(kept) /
                      static_cast<double>(distractor_total);
  }

  const double raw = weights.coverage * coverage + weights.thirds * alignment -
                     weights.distractor * distractor_kept;
  const double span = weights.coverage + weights.thirds + weights.distractor;
  return 1.0 + 4.0 * (raw + weights.distractor) / span;
}

std::pair<RawImage, AnnotatedImage> synth_generate(
    const SynthSceneSpec& spec, const GridSpec& grid,
    const std::string& annotation_path) {
  RawImage img = render_scene(spec);
  AnnotatedImage ann;
  ann.path = annotation_path;
  ann.dims = spec.canvas;
  const auto candidates = enumerate_candidates(spec.canvas, grid);
  ann.crops.reserve(candidates.size());
  for (const auto& c : candidates)
    ann.crops.push_back(CropMos{c, oracle_mos(spec, c)});
  return {std::move(img), std::move(ann)};
}

std::vector<AnnotatedImage> generate_dataset(const std::string& dir,
                                             const SynthDatasetOptions& opt) {
  if (opt.count < 1) throw Error("generate_dataset: count must be >= 1");
  opt.grid.validate();
  std::filesystem::create_directories(dir);

  Rng rng(opt.seed);
  std::vector<AnnotatedImage> annotations;
  annotations.reserve(static_cast<size_t>(opt.count));
  char name[64];
  for (int i = 0; i < opt.count; ++i) {
    const SynthSceneSpec spec = make_scene_spec(rng);
    std::snprintf(name, sizeof name, "img_%05d.ppm", i);
    auto [img, ann] = synth_generate(spec, opt.grid, name);
    write_ppm(dir + "/" + name, img);
    annotations.push_back(std::move(ann));
  }
  write_annotations(dir + "/annotations.txt", annotations);

  std::ofstream manifest(dir + "/manifest.txt");
  manifest << "seed " << opt.seed << "\ncount " << opt.count << "\n";
  return annotations;
}

}  // namespace gaic
