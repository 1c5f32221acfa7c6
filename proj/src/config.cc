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

#include "vxcode/config.h"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace vxcode {

namespace {

class LineParser {
 public:
  LineParser(const std::string& text, int line) : s_(text), line_(line) {}

  ConfigValue Value() {
    SkipSpace();
    if (pos_ >= s_.size()) Fail("missing value");
    const char c = s_[pos_];
    if (c == '"') return StringValue();
    if (c == '[') return ArrayValue();
    if (s_.compare(pos_, 4, "true") == 0) {
      pos_ += 4;
      ConfigValue v;
      v.kind = ConfigValue::Kind::kBool;
      v.boolean = true;
      return v;
    }
    if (s_.compare(pos_, 5, "false") == 0) {
      pos_ += 5;
      ConfigValue v;
      v.kind = ConfigValue::Kind::kBool;
      return v;
    }
    return NumberValue();
  }

  void ExpectEnd() {
    SkipSpace();
    if (pos_ < s_.size() && s_[pos_] != '#') Fail("trailing characters");
  }

 private:
  [[noreturn]] void Fail(const std::string& what) const {
    throw ConfigError("config line " + std::to_string(line_) + ": " + what);
  }

  void SkipSpace() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }

  ConfigValue StringValue() {
    ConfigValue v;
    v.kind = ConfigValue::Kind::kString;
    ++pos_;
    while (pos_ < s_.size() && s_[pos_] != '"') {
      char c = s_[pos_++];
      if (c == '\\') {
        if (pos_ >= s_.size()) Fail("unterminated escape");
        const char e = s_[pos_++];
        switch (e) {
          case 'n':
            c = '\n';
            break;
          case 't':
            c = '\t';
            break;
          case '"':
          case '\\':
            c = e;
            break;
          default:
            Fail("unsupported escape");
        }
      }
      v.text.push_back(c);
    }
    if (pos_ >= s_.size()) Fail("unterminated string");
    ++pos_;
    return v;
  }

  ConfigValue ArrayValue() {
    ConfigValue v;
    v.kind = ConfigValue::Kind::kArray;
    ++pos_;
    SkipSpace();
    if (pos_ < s_.size() && s_[pos_] == ']') {
      ++pos_;
      return v;
    }
    while (true) {
      v.items.push_back(Value());
      SkipSpace();
      if (pos_ >= s_.size()) Fail("unterminated array");
      if (s_[pos_] == ',') {
        ++pos_;
        SkipSpace();
        if (pos_ < s_.size() && s_[pos_] == ']') {
          ++pos_;
          return v;
        }
        continue;
      }
      if (s_[pos_] == ']') {
        ++pos_;
        return v;
      }
      Fail("expected ',' or ']'");
    }
  }

  ConfigValue NumberValue() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) ||
            s_[pos_] == '.' || s_[pos_] == '-' || s_[pos_] == '+' ||
            s_[pos_] == '_')) {
      ++pos_;
    }
    std::string token = s_.substr(start, pos_ - start);
    std::erase(token, '_');
    char* end = nullptr;
    const double d = std::strtod(token.c_str(), &end);
    if (token.empty() || end != token.c_str() + token.size() ||
        !std::isfinite(d)) {
      Fail("bad value '" + token + "'");
    }
    ConfigValue v;
    v.number = d;
    return v;
  }

  const std::string& s_;
  int line_;
  std::size_t pos_ = 0;
};

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool ValidKey(const std::string& k) {
  if (k.empty()) return false;
  for (char c : k) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-') {
      return false;
    }
  }
  return true;
}

}  // namespace

ConfigFile ConfigFile::Parse(const std::string& text) {
  ConfigFile out;
  std::stringstream ss(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  while (std::getline(ss, raw)) {
    ++line_no;
    const std::string line = Trim(raw);
    if (line.empty() || line[0] == '#') continue;
    if (line[0] == '[') {
      const auto close = line.find(']');
      if (close == std::string::npos) {
        throw ConfigError("config line " + std::to_string(line_no) +
                          ": unterminated section header");
      }
      section = Trim(line.substr(1, close - 1));
      const std::string rest = Trim(line.substr(close + 1));
      if (!ValidKey(section) || (!rest.empty() && rest[0] != '#')) {
        throw ConfigError("config line " + std::to_string(line_no) +
                          ": bad section header");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected key = value");
    }
    const std::string key = Trim(line.substr(0, eq));
    if (!ValidKey(key)) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": bad key '" + key + "'");
    }
    const std::string value_text = line.substr(eq + 1);
    LineParser parser(value_text, line_no);
    ConfigValue value = parser.Value();
    parser.ExpectEnd();
    const std::string full = section.empty() ? key : section + "." + key;
    if (!out.values_.emplace(full, std::move(value)).second) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": duplicate key " + full);
    }
  }
  return out;
}

ConfigFile ConfigFile::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return Parse(ss.str());
}

const ConfigValue* ConfigFile::Find(const std::string& key) const {
  const auto it = values_.find(key);
  return it == values_.end() ? nullptr : &it->second;
}

std::optional<double> ConfigFile::Number(const std::string& key) const {
  const ConfigValue* v = Find(key);
  if (!v) return std::nullopt;
  if (v->kind != ConfigValue::Kind::kNumber) {
    throw ConfigError(key + ": expected a number");
  }
  return v->number;
}

std::optional<std::int64_t> ConfigFile::Integer(const std::string& key) const {
  const auto d = Number(key);
  if (!d) return std::nullopt;
  if (std::floor(*d) != *d) throw ConfigError(key + ": expected an integer");
  return static_cast<std::int64_t>(*d);
}

std::optional<std::string> ConfigFile::String(const std::string& key) const {
  const ConfigValue* v = Find(key);
  if (!v) return std::nullopt;
  if (v->kind != ConfigValue::Kind::kString) {
    throw ConfigError(key + ": expected a string");
  }
  return v->text;
}

std::optional<bool> ConfigFile::Bool(const std::string& key) const {
  const ConfigValue* v = Find(key);
  if (!v) return std::nullopt;
  if (v->kind != ConfigValue::Kind::kBool) {
    throw ConfigError(key + ": expected true or false");
  }
  return v->boolean;
}

std::optional<std::vector<double>> ConfigFile::Numbers(
    const std::string& key) const {
  const ConfigValue* v = Find(key);
  if (!v) return std::nullopt;
  if (v->kind != ConfigValue::Kind::kArray) {
    throw ConfigError(key + ": expected an array");
  }
  std::vector<double> out;
  for (const ConfigValue& item : v->items) {
    if (item.kind != ConfigValue::Kind::kNumber) {
      throw ConfigError(key + ": expected an array of numbers");
    }
    out.push_back(item.number);
  }
  return out;
}

std::vector<std::string> ConfigFile::Keys() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : values_) out.push_back(k);
  return out;
}

namespace {

const std::set<std::string>& KnownKeys() {
  static const std::set<std::string> keys = {
      "seed",
      "detector.kind",
      "detector.weights",
      "detector.instance_weights",
      "detector.marker_patch",
      "detector.marker_gain",
      "detector.box",
      "detector.target_class",
      "detector.num_classes",
      "detector.command",
      "detector.name",
      "image.path",
      "image.width",
      "image.height",
      "image.channels",
      "grid.rows",
      "grid.cols",
      "grid.restrict",
      "target.box",
      "target.probs",
      "engine.r",
      "engine.L",
      "engine.gamma",
      "engine.mode",
      "engine.threads",
      "reward.variant",
      "reward.alpha",
      "reward.class",
      "reward.iou_gate",
      "ground_truth.box",
      "output.dir",
  };
  return keys;
}

BBox BoxFrom(const ConfigFile& f, const std::string& key) {
  const auto v = f.Numbers(key);
  if (!v || v->size() != 4) {
    throw ConfigError(key + ": expected [x1, y1, x2, y2]");
  }
  const BBox b{(*v)[0], (*v)[1], (*v)[2], (*v)[3]};
  if (!b.Valid()) throw ConfigError(key + ": need x1 <= x2 and y1 <= y2");
  return b;
}

int IntIn(const ConfigFile& f, const std::string& key, int fallback, int lo) {
  const auto v = f.Integer(key);
  if (!v) return fallback;
  if (*v < lo) {
    throw ConfigError(key + ": must be >= " + std::to_string(lo));
  }
  return static_cast<int>(*v);
}

}  // namespace

RunConfig ParseRunConfig(const ConfigFile& f) {
  for (const std::string& key : f.Keys()) {
    if (!KnownKeys().count(key))
      throw ConfigError("unknown config key: " + key);
  }
  RunConfig c;
  if (const auto seed = f.Integer("seed")) {
    if (*seed < 0) throw ConfigError("seed: must be >= 0");
    c.seed = static_cast<std::uint64_t>(*seed);
  }

  DetectorSource& d = c.detector;
  const std::string kind = f.String("detector.kind").value_or("additive");
  if (kind == "additive") {
    d.kind = DetectorKind::kAdditive;
    d.weights = f.Numbers("detector.weights").value_or(std::vector<double>{});
    if (d.weights.empty()) throw ConfigError("detector.weights: required");
  } else if (kind == "biased") {
    d.kind = DetectorKind::kBiased;
    d.weights =
        f.Numbers("detector.instance_weights").value_or(std::vector<double>{});
    d.marker_patch =
        static_cast<PatchIndex>(IntIn(f, "detector.marker_patch", 0, 0));
    d.marker_gain = f.Number("detector.marker_gain").value_or(0.5);
  } else if (kind == "sidecar") {
    d.kind = DetectorKind::kSidecar;
    d.command = f.String("detector.command").value_or("");
    d.name = f.String("detector.name").value_or("default");
  } else {
    throw ConfigError("detector.kind: unknown detector '" + kind + "'");
  }
  if (const char* env = std::getenv("VXCODE_SIDECAR");
      env && *env && d.kind == DetectorKind::kSidecar) {
    d.command = env;
  }
  if (d.kind == DetectorKind::kSidecar && d.command.empty()) {
    throw ConfigError("detector.command: required for a sidecar detector");
  }
  if (d.kind != DetectorKind::kSidecar) {
    d.box = BoxFrom(f, "detector.box");
    d.num_classes = IntIn(f, "detector.num_classes", 1, 1);
    d.target_class = IntIn(f, "detector.target_class", 0, 0);
    if (d.target_class >= d.num_classes) {
      throw ConfigError("detector.target_class: must be < num_classes");
    }
  }

  c.image_path = f.String("image.path");
  if (!c.image_path) {
    const auto w = f.Integer("image.width");
    const auto h = f.Integer("image.height");
    if (!w || !h || *w <= 0 || *h <= 0) {
      throw ConfigError("image: give either path or positive width/height");
    }
    c.image_width = static_cast<int>(*w);
    c.image_height = static_cast<int>(*h);
    c.image_channels = IntIn(f, "image.channels", 3, 1);
    if (c.image_channels > 4) throw ConfigError("image.channels: at most 4");
  }

  if (f.Has("grid.rows") != f.Has("grid.cols")) {
    throw ConfigError("grid: give both rows and cols, or neither");
  }
  if (f.Has("grid.rows")) {
    c.grid_rows = IntIn(f, "grid.rows", 1, 1);
    c.grid_cols = IntIn(f, "grid.cols", 1, 1);
  }
  c.restrict_candidates = f.Bool("grid.restrict").value_or(true);

  if (f.Has("target.box")) c.target_box = BoxFrom(f, "target.box");
  c.target_probs = f.Numbers("target.probs");

  EngineConfig& e = c.engine;
  e.r = IntIn(f, "engine.r", 1, 1);
  e.top_l = IntIn(f, "engine.L", 30, 1);
  e.gamma = f.Number("engine.gamma").value_or(0.1);
  e.threads = IntIn(f, "engine.threads", 1, 1);
  try {
    e.mode = ParseMode(f.String("engine.mode").value_or("insertion"));
    e.reward.variant =
        ParseRewardVariant(f.String("reward.variant").value_or("full"));
  } catch (const std::invalid_argument& err) {
    throw ConfigError(err.what());
  }
  e.reward.alpha = f.Number("reward.alpha");
  e.reward.predicted_class = IntIn(f, "reward.class", d.target_class, 0);
  e.reward.iou_gate = f.Number("reward.iou_gate");
  if (!(e.gamma >= 0.0 && e.gamma <= 1.0)) {
    throw ConfigError("engine.gamma: must lie in [0, 1]");
  }
  if (e.reward.alpha && e.reward.variant != RewardVariant::kAlphaWeighted) {
    throw ConfigError("reward.alpha: only valid with alpha_weighted");
  }
  if (!e.reward.alpha && e.reward.variant == RewardVariant::kAlphaWeighted) {
    throw ConfigError("reward.alpha: required for alpha_weighted");
  }

  if (f.Has("ground_truth.box"))
    c.ground_truth = BoxFrom(f, "ground_truth.box");
  c.output_dir = f.String("output.dir").value_or(".");
  return c;
}

RunConfig LoadRunConfig(const std::string& path) {
  return ParseRunConfig(ConfigFile::Load(path));
}

}  // namespace vxcode
