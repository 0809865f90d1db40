#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "run_config.hpp"

namespace gaic::cli {

// Values shared by every subcommand; CLI flags override config-file values.
struct GlobalOptions {
  std::string config_path;
  std::optional<uint64_t> seed;
  std::optional<int> threads;

  RunConfig load() const;
  uint64_t effective_seed(const RunConfig& rc) const;
};

struct GenerateArgs {
  std::string dims;   // "HxW"; empty when an image is given
  std::string image;  // PPM path; empty when dims are given
  std::string out;    // crop list file; empty prints to stdout
};
int cmd_generate(const GlobalOptions& g, const GenerateArgs& a);

struct SynthArgs {
  int count = 1;
  std::string out_dir;
};
int cmd_synth(const GlobalOptions& g, const SynthArgs& a);

struct TrainArgs {
  std::string annotations;
  std::string images_dir;  // defaults to the annotation file's directory
  std::string out_checkpoint;
  std::string log_path;
};
int cmd_train(const GlobalOptions& g, const TrainArgs& a);

struct EvaluateArgs {
  std::string annotations;
  std::string checkpoint;        // exactly one of checkpoint/predictions
  std::string predictions;
  std::string images_dir;
  std::string report_path;
  std::string kv_path;
  std::string dump_predictions;
};
int cmd_evaluate(const GlobalOptions& g, const EvaluateArgs& a);

struct CropArgs {
  std::string checkpoint;
  std::string image;
  int top_k = 1;
  std::optional<double> aspect;
  std::string out_dir = ".";
};
int cmd_crop(const GlobalOptions& g, const CropArgs& a);

struct BaselineArgs {
  std::string mode;   // N, C or L
  std::string dims;   // "HxW"
  std::string image;  // alternative to dims
  std::string out;    // cropped image output (requires --image)
};
int cmd_baseline(const GlobalOptions& g, const BaselineArgs& a);

ImageDims parse_dims(const std::string& text);

}  // namespace gaic::cli
