#include "commands.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "gaic/checkpoint.hpp"
#include "gaic/synth.hpp"

namespace gaic::cli {

namespace fs = std::filesystem;

RunConfig GlobalOptions::load() const {
  RunConfig rc = config_path.empty()
                     ? RunConfig::defaults()
                     : RunConfig::from_config(
                           KeyValueConfig::from_file(config_path));
  if (seed) rc.train.seed = *seed;
  if (threads) rc.eval.threads = *threads;
  return rc;
}

uint64_t GlobalOptions::effective_seed(const RunConfig& rc) const {
  return seed.value_or(rc.train.seed);
}

ImageDims parse_dims(const std::string& text) {
  const auto x = text.find('x');
  if (x == std::string::npos || x == 0 || x + 1 >= text.size())
    throw Error("dims must be '<height>x<width>', got '" + text + "'");
  try {
    return ImageDims{std::stoi(text.substr(0, x)),
                     std::stoi(text.substr(x + 1))};
  } catch (const std::exception&) {
    throw Error("dims must be '<height>x<width>', got '" + text + "'");
  }
}

namespace {

ImageDims dims_from_args(const std::string& dims, const std::string& image,
                         const char* cmd) {
  if (!dims.empty() && !image.empty())
    throw Error(std::string(cmd) + ": give either --dims or --image, not both");
  if (!dims.empty()) return parse_dims(dims);
  if (!image.empty()) return read_ppm(image).dims();
  throw Error(std::string(cmd) + ": either --dims or --image is required");
}

std::string default_images_dir(const std::string& annotations,
                               const std::string& images_dir) {
  if (!images_dir.empty()) return images_dir;
  const auto parent = fs::path(annotations).parent_path().string();
  return parent.empty() ? "." : parent;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw Error("failed writing '" + path + "'");
}

}  // namespace

int cmd_generate(const GlobalOptions& g, const GenerateArgs& a) {
  const RunConfig rc = g.load();
  const ImageDims dims = dims_from_args(a.dims, a.image, "generate");
  const auto candidates = enumerate_candidates(dims, rc.grid);
  std::cout << "candidates " << candidates.size() << '\n';
  const std::string listing = format_crop_list(candidates);
  if (a.out.empty())
    std::cout << listing;
  else
    write_text_file(a.out, listing);
  return 0;
}

int cmd_synth(const GlobalOptions& g, const SynthArgs& a) {
  const RunConfig rc = g.load();
  SynthDatasetOptions opt;
  opt.count = a.count;
  opt.seed = g.effective_seed(rc);
  opt.grid = rc.grid;
  const auto annotations = generate_dataset(a.out_dir, opt);
  size_t crops = 0;
  for (const auto& ann : annotations) crops += ann.crops.size();
  std::cout << "wrote " << annotations.size() << " images (" << crops
            << " annotated crops) to " << a.out_dir << '\n';
  return 0;
}

int cmd_train(const GlobalOptions& g, const TrainArgs& a) {
  RunConfig rc = g.load();
  rc.train.seed = g.effective_seed(rc);
  const auto annotations = read_annotations(a.annotations);
  for (const auto& ann : annotations)
    if (ann.prediction)
      throw Error("train: '" + a.annotations +
                  "' contains prediction records, not groundtruth");
  const std::string images = default_images_dir(a.annotations, a.images_dir);

  std::ofstream log;
  if (!a.log_path.empty()) {
    log.open(a.log_path);
    if (!log) throw Error("cannot open log file '" + a.log_path + "'");
    log << "seed " << rc.train.seed << '\n';
  }
  TrainResult result = train_model(annotations, images, rc.train,
                                   a.log_path.empty() ? nullptr : &log);
  result.model.set_train_seed(rc.train.seed);
  save_checkpoint(a.out_checkpoint, result.model);
  std::cout << "trained " << result.log.size() << " epochs on "
            << result.train_indices.size() << " images ("
            << result.val_indices.size() << " validation); checkpoint "
            << a.out_checkpoint << '\n';
  if (!result.log.empty() && result.log.back().has_val)
    std::cout << "best_epoch " << result.best_epoch << '\n';
  return 0;
}

int cmd_evaluate(const GlobalOptions& g, const EvaluateArgs& a) {
  const RunConfig rc = g.load();
  if (a.checkpoint.empty() == a.predictions.empty())
    throw Error("evaluate: exactly one of --checkpoint or --predictions is required");
  const auto annotations = read_annotations(a.annotations);
  for (const auto& ann : annotations)
    if (ann.prediction)
      throw Error("evaluate: groundtruth file '" + a.annotations +
                  "' contains prediction records");

  EvalResult result;
  if (!a.checkpoint.empty()) {
    const nn::CropScorer model = nn::load_checkpoint(a.checkpoint);
    const std::string images = default_images_dir(a.annotations, a.images_dir);
    result = evaluate_model(model, annotations, images, rc.eval);
  } else {
    const auto preds = read_annotations(a.predictions);
    result.model_report = evaluate_predictions(annotations, preds, rc.eval.beta);
    result.baselines = baseline_rows(annotations, rc.eval.beta);
    result.predictions = preds;
  }

  const std::string table = format_eval_table(result);
  std::cout << table;
  if (!a.report_path.empty()) write_text_file(a.report_path, table);
  if (!a.kv_path.empty()) {
    std::string kv = format_eval_kv(result);
    kv += "seed " + std::to_string(g.effective_seed(rc)) + "\n";
    write_text_file(a.kv_path, kv);
  }
  if (!a.dump_predictions.empty())
    write_annotations(a.dump_predictions, result.predictions);
  return 0;
}

int cmd_crop(const GlobalOptions& g, const CropArgs& a) {
  const RunConfig rc = g.load();
  if (a.top_k < 1) throw Error("crop: -k must be >= 1");
  const nn::CropScorer model = nn::load_checkpoint(a.checkpoint);
  const RawImage raw = read_ppm(a.image);
  const PreprocessedImage pre =
      preprocess(raw, rc.eval.short_side, rc.eval.channel_norm);
  const auto scored =
      nn::predict_image(model, pre, rc.grid, a.top_k, a.aspect);
  if (static_cast<int>(scored.size()) < a.top_k)
    std::cerr << "warning: only " << scored.size()
              << " candidates available, returning them all\n";

  fs::create_directories(a.out_dir);
  std::ostringstream sidecar;
  sidecar << "seed " << model.train_seed() << '\n';
  char buf[160];
  for (const auto& sc : scored) {
    std::snprintf(buf, sizeof buf, "crop_%02d.ppm", sc.rank);
    write_ppm(a.out_dir + "/" + buf, crop_image(raw, sc.rect));
    std::snprintf(buf, sizeof buf, "%d %d %d %d %.4f\n", sc.rect.x1,
                  sc.rect.y1, sc.rect.x2, sc.rect.y2, sc.score);
    sidecar << buf;
  }
  write_text_file(a.out_dir + "/crops.txt", sidecar.str());
  std::cout << "wrote " << scored.size() << " crops to " << a.out_dir << '\n';
  return 0;
}

int cmd_baseline(const GlobalOptions& g, const BaselineArgs& a) {
  const RunConfig rc = g.load();
  const BaselineMode mode = parse_baseline_mode(a.mode);
  const ImageDims dims = dims_from_args(a.dims, a.image, "baseline");
  const CropRect rect = baseline_crop(dims, mode, rc.grid);
  std::cout << rect.x1 << ' ' << rect.y1 << ' ' << rect.x2 << ' ' << rect.y2
            << '\n';
  if (!a.out.empty()) {
    if (a.image.empty())
      throw Error("baseline: --out needs --image to crop from");
    write_ppm(a.out, crop_image(read_ppm(a.image), rect));
  }
  return 0;
}

}  // namespace gaic::cli
