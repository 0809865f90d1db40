#pragma once

#include <map>
#include <string>
#include <vector>

#include "gaic/evaluate.hpp"
#include "gaic/geometry.hpp"
#include "gaic/training.hpp"

namespace gaic::cli {

// Plain "key = value" configuration with [section] headers; keys are
// flattened to "section.key". Lines starting with '#' are comments.
class KeyValueConfig {
 public:
  static KeyValueConfig from_file(const std::string& path);
  static KeyValueConfig from_string(const std::string& text,
                                    const std::string& source_name);

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  int get_int(const std::string& key, int fallback) const;
  uint64_t get_u64(const std::string& key, uint64_t fallback) const;
  double get_double(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_doubles(const std::string& key) const;
  std::vector<int> get_ints(const std::string& key) const;

 private:
  std::string source_;
  std::map<std::string, std::string> values_;
};

// Everything a run needs, assembled from config-file values with CLI
// overrides applied afterwards.
struct RunConfig {
  GridSpec grid;
  TrainOptions train;
  EvalOptions eval;

  static RunConfig defaults();
  static RunConfig from_config(const KeyValueConfig& cfg);
};

}  // namespace gaic::cli
