#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "gaic/annotations.hpp"
#include "gaic/image.hpp"
#include "gaic/rng.hpp"

namespace gaic {

struct DistractorSpec {
  CropRect rect;
  std::array<uint8_t, 3> color{0, 0, 0};
};

// Full description of a synthetic scene: a textured background, one salient
// subject rectangle and high-contrast distractor blobs near the borders.
// Rendering and scoring are pure functions of this spec, so a scene is
// reproducible from its seed alone.
struct SynthSceneSpec {
  uint64_t seed = 0;
  ImageDims canvas;
  CropRect subject;
  std::array<uint8_t, 3> subject_color{220, 90, 40};
  std::vector<DistractorSpec> distractors;
  std::array<uint8_t, 3> bg_a{60, 80, 110};
  std::array<uint8_t, 3> bg_b{110, 130, 150};
  double texture_amplitude = 7.0;
  double texture_wavelength = 31.0;
  double noise_amplitude = 5.0;

  void validate() const;
};

// Score weights: coverage of the subject, rule-of-thirds placement of the
// subject center within the crop, and a penalty for retained distractors.
struct OracleWeights {
  double coverage = 0.5;
  double thirds = 0.3;
  double distractor = 0.2;
};

// Randomized scene layout drawn from the rng stream.
SynthSceneSpec make_scene_spec(Rng& rng);

RawImage render_scene(const SynthSceneSpec& spec);

// Deterministic quality score in [1,5] for a crop of the scene:
// an affine map of
//   coverage * (subject area kept) + thirds * (center alignment)
//   - distractor * (distractor area kept).
// Mirror-symmetric in the column axis.
double oracle_mos(const SynthSceneSpec& spec, const CropRect& crop,
                  const OracleWeights& weights = {});

// Renders the scene and scores every grid-anchor candidate crop.
std::pair<RawImage, AnnotatedImage> synth_generate(
    const SynthSceneSpec& spec, const GridSpec& grid,
    const std::string& annotation_path);

struct SynthDatasetOptions {
  int count = 1;
  uint64_t seed = 0;
  GridSpec grid;
};

// Writes count PPM images plus annotations.txt and manifest.txt into dir
// (created if absent). Returns the annotation records.
std::vector<AnnotatedImage> generate_dataset(const std::string& dir,
                                             const SynthDatasetOptions& opt);

}  // namespace gaic
