#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "gaic/augment.hpp"
#include "gaic/geometry.hpp"

namespace gaic {

// One image's candidate crops with their scores. Groundtruth records carry
// mean opinion scores in [1,5]; prediction records carry model scores with
// no range restriction.
struct AnnotatedImage {
  std::string path;
  ImageDims dims;
  std::vector<CropMos> crops;
  bool prediction = false;
};

inline constexpr char kAnnotationMagic[] = "GAIC-ANN v1";

// Text format, one record per image:
//   GAIC-ANN v1
//   IMG <path> <H> <W> <num_crops>      (or PRED for prediction records)
//   <x1> <y1> <x2> <y2> <score>         (score printed to 4 decimals)
std::vector<AnnotatedImage> read_annotations(std::istream& in,
                                             const std::string& source_name);
std::vector<AnnotatedImage> read_annotations(const std::string& path);
void write_annotations(std::ostream& out,
                       const std::vector<AnnotatedImage>& images);
void write_annotations(const std::string& path,
                       const std::vector<AnnotatedImage>& images);

}  // namespace gaic
