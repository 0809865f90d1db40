#include "gaic/checkpoint.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace gaic::nn {

namespace {

static_assert(sizeof(float) == 4, "checkpoint format needs 32-bit floats");

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

[[noreturn]] void fail(const std::string& source, const std::string& what) {
  throw Error(source + ": " + what);
}

}  // namespace

void save_parameters(std::ostream& out, std::span<const TensorPtr> params,
                     std::span<const std::string> names) {
  if (params.size() != names.size())
    throw Error("save_parameters: name/parameter count mismatch");
  out << "tensors " << params.size() << '\n';
  for (size_t i = 0; i < params.size(); ++i) {
    out << names[i] << ' ' << params[i]->ndim();
    for (int d : params[i]->shape) out << ' ' << d;
    out << '\n';
  }
  out << "DATA\n";
  std::vector<float> buf;
  for (const auto& p : params) {
    buf.resize(p->value.size());
    for (size_t j = 0; j < buf.size(); ++j)
      buf[j] = static_cast<float>(p->value[j]);
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size() * sizeof(float)));
  }
}

void load_parameters(std::istream& in, std::span<const TensorPtr> params,
                     std::span<const std::string> names,
                     const std::string& source_name) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("tensors ", 0) != 0)
    fail(source_name, "expected 'tensors <count>' line");
  const size_t count = std::stoul(line.substr(8));
  if (count != params.size())
    fail(source_name, "checkpoint has " + std::to_string(count) +
                          " tensors, model expects " +
                          std::to_string(params.size()));
  for (size_t i = 0; i < count; ++i) {
    if (!std::getline(in, line)) fail(source_name, "truncated tensor header");
    std::istringstream ls(line);
    std::string name;
    int ndim = 0;
    ls >> name >> ndim;
    if (name != names[i])
      fail(source_name, "tensor " + std::to_string(i) + " is '" + name +
                            "', expected '" + names[i] + "'");
    if (ndim != params[i]->ndim())
      fail(source_name, "tensor '" + name + "' rank mismatch");
    for (int d = 0; d < ndim; ++d) {
      int extent = 0;
      if (!(ls >> extent) || extent != params[i]->dim(d))
        fail(source_name, "tensor '" + name + "' shape mismatch");
    }
  }
  if (!std::getline(in, line) || line != "DATA")
    fail(source_name, "expected DATA marker");
  std::vector<float> buf;
  for (size_t i = 0; i < count; ++i) {
    buf.resize(params[i]->value.size());
    in.read(reinterpret_cast<char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(float)));
    if (static_cast<size_t>(in.gcount()) != buf.size() * sizeof(float))
      fail(source_name, "truncated data for tensor '" + names[i] + "'");
    for (size_t j = 0; j < buf.size(); ++j)
      params[i]->value[j] = static_cast<double>(buf[j]);
  }
}

void save_checkpoint(std::ostream& out, const CropScorer& model) {
  const auto& c = model.config();
  out << kCheckpointMagic << '\n';
  out << "channels";
  for (int ch : c.backbone_channels) out << ' ' << ch;
  out << '\n';
  out << "reduced_channels " << c.reduced_channels << '\n';
  out << "align_size " << c.align_size << '\n';
  out << "head_width " << c.head_width << '\n';
  out << "mos_mean " << format_double(model.mos_norm().mean) << '\n';
  out << "mos_std " << format_double(model.mos_norm().stddev) << '\n';
  out << "seed " << model.train_seed() << '\n';
  save_parameters(out, model.parameters(), model.parameter_names());
}

void save_checkpoint(const std::string& path, const CropScorer& model) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  save_checkpoint(f, model);
  if (!f) throw Error("failed writing checkpoint '" + path + "'");
}

CropScorer load_checkpoint(std::istream& in, const std::string& source_name) {
  std::string line;
  if (!std::getline(in, line) || line != kCheckpointMagic)
    fail(source_name, "not a checkpoint (missing '" +
                          std::string(kCheckpointMagic) + "' magic line)");
  ModelConfig config;
  MosNormalization norm;
  auto expect = [&](const char* key) -> std::istringstream {
    if (!std::getline(in, line)) fail(source_name, "truncated config block");
    std::istringstream ls(line);
    std::string k;
    ls >> k;
    if (k != key)
      fail(source_name, "expected config key '" + std::string(key) +
                            "', got '" + k + "'");
    return ls;
  };
  {
    auto ls = expect("channels");
    for (auto& ch : config.backbone_channels)
      if (!(ls >> ch)) fail(source_name, "malformed channels line");
  }
  expect("reduced_channels") >> config.reduced_channels;
  expect("align_size") >> config.align_size;
  expect("head_width") >> config.head_width;
  expect("mos_mean") >> norm.mean;
  expect("mos_std") >> norm.stddev;
  uint64_t seed = 0;
  expect("seed") >> seed;

  CropScorer model(config, /*init_seed=*/0);
  model.mos_norm() = norm;
  model.set_train_seed(seed);
  load_parameters(in, model.parameters(), model.parameter_names(),
                  source_name);
  return model;
}

CropScorer load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open checkpoint '" + path + "'");
  return load_checkpoint(f, path);
}

}  // namespace gaic::nn
