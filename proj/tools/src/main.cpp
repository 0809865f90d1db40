#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
  using namespace gaic::cli;

  CLI::App app{"Grid-anchor image cropping: candidate generation, training, "
               "evaluation and cropping"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  GlobalOptions global;
  app.add_option("--config", global.config_path,
                 "Configuration file (key = value with [section] headers)");
  app.add_option("--seed", global.seed, "Seed override for this run");
  app.add_option("--threads", global.threads,
                 "Worker threads for per-image evaluation work");

  GenerateArgs gen;
  auto* c_gen = app.add_subcommand(
      "generate", "Enumerate grid-anchor candidate crops");
  c_gen->add_option("--dims", gen.dims, "Image extents as <height>x<width>");
  c_gen->add_option("--image", gen.image, "PPM image to take extents from");
  c_gen->add_option("--out", gen.out, "Crop list output file");

  SynthArgs synth;
  auto* c_synth = app.add_subcommand(
      "synth", "Generate a synthetic annotated dataset");
  c_synth->add_option("--count", synth.count, "Number of images")
      ->check(CLI::PositiveNumber);
  c_synth->add_option("--out", synth.out_dir, "Output directory")->required();

  TrainArgs train;
  auto* c_train = app.add_subcommand("train", "Train a crop-scoring model");
  c_train->add_option("--annotations", train.annotations,
                      "Groundtruth annotation file")
      ->required();
  c_train->add_option("--images", train.images_dir,
                      "Image directory (default: the annotation file's)");
  c_train->add_option("--out", train.out_checkpoint, "Checkpoint output path")
      ->required();
  c_train->add_option("--log", train.log_path, "Training log path");

  EvaluateArgs eval;
  auto* c_eval = app.add_subcommand(
      "evaluate", "Evaluate a checkpoint or a prediction file");
  c_eval->add_option("--annotations", eval.annotations,
                     "Groundtruth annotation file")
      ->required();
  c_eval->add_option("--checkpoint", eval.checkpoint, "Model checkpoint");
  c_eval->add_option("--predictions", eval.predictions,
                     "Precomputed prediction file (instead of a checkpoint)");
  c_eval->add_option("--images", eval.images_dir, "Image directory");
  c_eval->add_option("--report", eval.report_path, "Report table output path");
  c_eval->add_option("--kv", eval.kv_path, "Machine-readable report path");
  c_eval->add_option("--dump-predictions", eval.dump_predictions,
                     "Write model predictions as a PRED annotation file");

  CropArgs crop;
  auto* c_crop = app.add_subcommand("crop", "Crop one image with a model");
  c_crop->add_option("--checkpoint", crop.checkpoint, "Model checkpoint")
      ->required();
  c_crop->add_option("--image", crop.image, "PPM image to crop")->required();
  c_crop->add_option("-k,--top-k", crop.top_k, "Number of crops to return");
  c_crop->add_option("--aspect", crop.aspect,
                     "Restrict candidates to this width/height ratio");
  c_crop->add_option("--out-dir", crop.out_dir, "Output directory");

  BaselineArgs baseline;
  auto* c_base = app.add_subcommand("baseline", "Compute a baseline crop");
  c_base->add_option("--mode", baseline.mode, "Baseline mode: N, C or L")
      ->required();
  c_base->add_option("--dims", baseline.dims, "Image extents as <height>x<width>");
  c_base->add_option("--image", baseline.image, "PPM image");
  c_base->add_option("--out", baseline.out, "Cropped image output (PPM)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_gen->parsed()) return cmd_generate(global, gen);
    if (c_synth->parsed()) return cmd_synth(global, synth);
    if (c_train->parsed()) return cmd_train(global, train);
    if (c_eval->parsed()) return cmd_evaluate(global, eval);
    if (c_crop->parsed()) return cmd_crop(global, crop);
    if (c_base->parsed()) return cmd_baseline(global, baseline);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
