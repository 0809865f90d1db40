#include "run_config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace gaic::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

KeyValueConfig KeyValueConfig::from_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return from_string(ss.str(), path);
}

KeyValueConfig KeyValueConfig::from_string(const std::string& text,
                                           const std::string& source_name) {
  KeyValueConfig cfg;
  cfg.source_ = source_name;
  std::istringstream in(text);
  std::string line, section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw Error(source_name + ":" + std::to_string(line_no) +
                    ": malformed section header '" + line + "'");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(source_name + ":" + std::to_string(line_no) +
                  ": expected 'key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw Error(source_name + ":" + std::to_string(line_no) + ": empty key");
    cfg.values_[section.empty() ? key : section + "." + key] = value;
  }
  return cfg;
}

bool KeyValueConfig::has(const std::string& key) const {
  return values_.count(key) > 0;
}

std::string KeyValueConfig::get_string(const std::string& key,
                                       const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

int KeyValueConfig::get_int(const std::string& key, int fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    return std::stoi(it->second);
  } catch (const std::exception&) {
    throw Error(source_ + ": key '" + key + "' is not an integer: '" +
                it->second + "'");
  }
}

uint64_t KeyValueConfig::get_u64(const std::string& key,
                                 uint64_t fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    return std::stoull(it->second);
  } catch (const std::exception&) {
    throw Error(source_ + ": key '" + key + "' is not an unsigned integer: '" +
                it->second + "'");
  }
}

double KeyValueConfig::get_double(const std::string& key,
                                  double fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    return std::stod(it->second);
  } catch (const std::exception&) {
    throw Error(source_ + ": key '" + key + "' is not a number: '" +
                it->second + "'");
  }
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::string v = it->second;
  std::transform(v.begin(), v.end(), v.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw Error(source_ + ": key '" + key + "' is not a boolean: '" + it->second +
              "'");
}

std::vector<double> KeyValueConfig::get_doubles(const std::string& key) const {
  std::vector<double> out;
  const auto it = values_.find(key);
  if (it == values_.end()) return out;
  std::istringstream ss(it->second);
  double v;
  while (ss >> v) out.push_back(v);
  return out;
}

std::vector<int> KeyValueConfig::get_ints(const std::string& key) const {
  std::vector<int> out;
  const auto it = values_.find(key);
  if (it == values_.end()) return out;
  std::istringstream ss(it->second);
  int v;
  while (ss >> v) out.push_back(v);
  return out;
}

RunConfig RunConfig::defaults() { return RunConfig{}; }

RunConfig RunConfig::from_config(const KeyValueConfig& cfg) {
  RunConfig rc;

  rc.grid.rows = cfg.get_int("grid.rows", rc.grid.rows);
  rc.grid.cols = cfg.get_int("grid.cols", rc.grid.cols);
  rc.grid.corner_rows = cfg.get_int("grid.corner_rows", rc.grid.corner_rows);
  rc.grid.corner_cols = cfg.get_int("grid.corner_cols", rc.grid.corner_cols);
  rc.grid.min_area_frac =
      cfg.get_double("grid.min_area_frac", rc.grid.min_area_frac);
  rc.grid.aspect_min = cfg.get_double("grid.aspect_min", rc.grid.aspect_min);
  rc.grid.aspect_max = cfg.get_double("grid.aspect_max", rc.grid.aspect_max);

  auto& model = rc.train.model;
  if (cfg.has("model.channels")) {
    const auto ch = cfg.get_ints("model.channels");
    if (ch.size() != model.backbone_channels.size())
      throw Error("config: model.channels needs " +
                  std::to_string(model.backbone_channels.size()) + " values");
    std::copy(ch.begin(), ch.end(), model.backbone_channels.begin());
  }
  model.reduced_channels =
      cfg.get_int("model.reduced_channels", model.reduced_channels);
  model.align_size = cfg.get_int("model.align_size", model.align_size);
  model.head_width = cfg.get_int("model.head_width", model.head_width);

  rc.train.epochs = cfg.get_int("train.epochs", rc.train.epochs);
  rc.train.learning_rate =
      cfg.get_double("train.learning_rate", rc.train.learning_rate);
  rc.train.crops_per_batch =
      cfg.get_int("train.crops_per_batch", rc.train.crops_per_batch);
  rc.train.seed = cfg.get_u64("train.seed", rc.train.seed);
  rc.train.val_fraction =
      cfg.get_double("train.val_fraction", rc.train.val_fraction);
  rc.train.augment = cfg.get_bool("train.augment", rc.train.augment);
  rc.train.short_side = cfg.get_int("train.short_side", rc.train.short_side);
  auto range = [&](const char* key, double& lo, double& hi) {
    const auto v = cfg.get_doubles(key);
    if (v.empty()) return;
    if (v.size() != 2)
      throw Error(std::string("config: ") + key + " needs two values");
    lo = v[0];
    hi = v[1];
  };
  auto& aug = rc.train.aug_ranges;
  range("train.brightness", aug.brightness_min, aug.brightness_max);
  range("train.contrast", aug.contrast_min, aug.contrast_max);
  range("train.saturation", aug.saturation_min, aug.saturation_max);
  range("train.hue", aug.hue_min, aug.hue_max);
  aug.flip_prob = cfg.get_double("train.flip_prob", aug.flip_prob);

  rc.eval.beta = cfg.get_double("eval.beta", rc.eval.beta);
  rc.eval.threads = cfg.get_int("eval.threads", rc.eval.threads);
  rc.eval.grid = rc.grid;
  rc.eval.short_side = rc.train.short_side;
  return rc;
}

}  // namespace gaic::cli
