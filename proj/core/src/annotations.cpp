#include "gaic/annotations.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace gaic {

namespace {

[[noreturn]] void fail(const std::string& source, int line,
                       const std::string& what) {
  throw Error(source + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

std::vector<AnnotatedImage> read_annotations(std::istream& in,
                                             const std::string& source_name) {
  std::string line;
  int line_no = 0;
  if (!std::getline(in, line)) fail(source_name, 1, "empty annotation file");
  ++line_no;
  if (line != kAnnotationMagic)
    fail(source_name, line_no,
         "unknown version line '" + line + "', expected '" +
             std::string(kAnnotationMagic) + "'");

  std::vector<AnnotatedImage> out;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag != "IMG" && tag != "PRED")
      fail(source_name, line_no, "expected IMG or PRED record, got '" + tag + "'");
    AnnotatedImage img;
    img.prediction = tag == "PRED";
    int num_crops = 0;
    if (!(ls >> img.path >> img.dims.height >> img.dims.width >> num_crops))
      fail(source_name, line_no,
           "malformed record header '" + line + "'");
    if (img.dims.height < 1 || img.dims.width < 1)
      fail(source_name, line_no, "non-positive image extents");
    if (num_crops < 0) fail(source_name, line_no, "negative crop count");
    img.crops.reserve(static_cast<size_t>(num_crops));
    for (int i = 0; i < num_crops; ++i) {
      if (!std::getline(in, line))
        fail(source_name, line_no, "image '" + img.path + "' promises " +
                                       std::to_string(num_crops) +
                                       " crops but the file ends early");
      ++line_no;
      std::istringstream cs(line);
      CropMos cm;
      if (!(cs >> cm.rect.x1 >> cm.rect.y1 >> cm.rect.x2 >> cm.rect.y2 >>
            cm.mos))
        fail(source_name, line_no, "malformed crop line '" + line + "'");
      try {
        validate_crop(cm.rect, img.dims);
      } catch (const Error& e) {
        fail(source_name, line_no,
             "image '" + img.path + "': " + e.what());
      }
      if (!std::isfinite(cm.mos))
        fail(source_name, line_no, "non-finite score");
      if (!img.prediction && (cm.mos < 1.0 || cm.mos > 5.0))
        fail(source_name, line_no,
             "image '" + img.path + "': MOS " + std::to_string(cm.mos) +
                 " outside [1,5]");
      img.crops.push_back(cm);
    }
    out.push_back(std::move(img));
  }
  return out;
}

std::vector<AnnotatedImage> read_annotations(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open annotation file '" + path + "'");
  return read_annotations(f, path);
}

void write_annotations(std::ostream& out,
                       const std::vector<AnnotatedImage>& images) {
  out << kAnnotationMagic << '\n';
  char buf[160];
  for (const auto& img : images) {
    out << (img.prediction ? "PRED" : "IMG") << ' ' << img.path << ' '
        << img.dims.height << ' ' << img.dims.width << ' ' << img.crops.size()
        << '\n';
    for (const auto& c : img.crops) {
      std::snprintf(buf, sizeof buf, "%d %d %d %d %.4f\n", c.rect.x1,
                    c.rect.y1, c.rect.x2, c.rect.y2, c.mos);
      out << buf;
    }
  }
}

void write_annotations(const std::string& path,
                       const std::vector<AnnotatedImage>& images) {
  std::ofstream f(path);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  write_annotations(f, images);
  if (!f) throw Error("failed writing annotations '" + path + "'");
}

}  // namespace gaic
