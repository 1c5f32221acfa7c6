// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//
// Run configuration files. The grammar is the TOML subset
//
//   # comment
//   [section]
//   key = "string" | 123 | 0.5 | true | [1, 2.5, "x"]
//
// with one key per line and single-line arrays. Keys are addressed as
// "section.key"; keys before the first section have no prefix.
//

#ifndef VXCODE_CONFIG_H_
#define VXCODE_CONFIG_H_

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vxcode/detector.h"
#include "vxcode/greedy_engine.h"

namespace vxcode {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ConfigValue {
  enum class Kind { kNumber, kString, kBool, kArray };
  Kind kind = Kind::kNumber;
  double number = 0.0;
  std::string text;
  bool boolean = false;
  std::vector<ConfigValue> items;
};

class ConfigFile {
 public:
  // Throws ConfigError with a line number on syntax errors.
  static ConfigFile Parse(const std::string& text);
  static ConfigFile Load(const std::string& path);

  bool Has(const std::string& key) const { return values_.count(key) != 0; }
  const ConfigValue* Find(const std::string& key) const;

  std::optional<double> Number(const std::string& key) const;
  std::optional<std::int64_t> Integer(const std::string& key) const;
  std::optional<std::string> String(const std::string& key) const;
  std::optional<bool> Bool(const std::string& key) const;
  std::optional<std::vector<double>> Numbers(const std::string& key) const;

  std::vector<std::string> Keys() const;

 private:
  std::map<std::string, ConfigValue> values_;
};

enum class DetectorKind { kAdditive, kBiased, kSidecar };

struct DetectorSource {
  DetectorKind kind = DetectorKind::kAdditive;
  std::vector<double> weights;  // additive, or instance weights when biased
  PatchIndex marker_patch = 0;
  double marker_gain = 0.5;
  BBox box;
  int target_class = 0;
  int num_classes = 1;
  std::string command;  // sidecar
  std::string name = "default";
};

struct RunConfig {
  DetectorSource detector;
  std::optional<std::string> image_path;
  int image_width = 0;
  int image_height = 0;
  int image_channels = 3;
  std::optional<int> grid_rows;
  std::optional<int> grid_cols;
  bool restrict_candidates = true;
  // Unset fields are filled from the detector's output on the full image.
  std::optional<BBox> target_box;
  std::optional<std::vector<double>> target_probs;
  EngineConfig engine;
  std::optional<BBox> ground_truth;
  std::string output_dir = ".";
  std::uint64_t seed = 0;
};

// Throws ConfigError on unknown keys, missing required keys, or bad values.
// VXCODE_SIDECAR, when set, replaces the sidecar command.
RunConfig ParseRunConfig(const ConfigFile& file);
RunConfig LoadRunConfig(const std::string& path);

}  // namespace vxcode

#endif  // VXCODE_CONFIG_H_
