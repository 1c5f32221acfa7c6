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
// Subcommands of the vxcode tool. Each returns a process exit code:
//
//   0  success
//   1  verification failure (oracle residual, bias expectation)
//   2  usage or configuration error
//   3  detector or transport failure during a run
//

#ifndef VXCODE_COMMANDS_H_
#define VXCODE_COMMANDS_H_

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vxcode/config.h"
#include "vxcode/detector.h"
#include "vxcode/greedy_engine.h"
#include "vxcode/image.h"

namespace vxcode {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerification = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitRuntime = 3;

// Image with every channel value drawn as k/255, k in [1, 255]. Values are
// nonzero so a masked patch never equals the original, and they survive an
// 8-bit PNG round trip exactly.
Image SyntheticImage(int width, int height, int channels, std::uint64_t seed);

// Everything a run needs, resolved from a RunConfig.
struct Scene {
  Image image;
  std::shared_ptr<Detector> detector;
  TargetDetection target;
  PatchGrid grid{1, 1, 1, 1};
  PatchSet candidates;
  EngineConfig engine;
};

// Throws ConfigError for unusable configs (including a missing image file),
// DetectorError/TransportError when the detector fails while the target is
// resolved.
Scene BuildScene(const RunConfig& config);

int CmdExplain(const RunConfig& config, std::ostream& out, std::ostream& err);

// `input` is a trace file or a heat-map CSV.
int CmdEvaluate(const RunConfig& config, const std::string& input,
                std::ostream& out, std::ostream& err);

int CmdOracle(int n, int trials, std::uint64_t seed, bool corrupt,
              std::ostream& out, std::ostream& err);

struct BiasBenchOptions {
  std::uint64_t seed = 0;
  double beta = 0.5;
  // When false, every instance weight is zero.
  bool with_instance = true;
  std::optional<std::string> output_dir;
};

struct BiasBenchReport {
  std::size_t n = 0;
  std::size_t window = 0;  // ceil(0.1 n)
  PatchIndex marker_patch = 0;
  PatchSet instance_patches;
  // 1-based selection positions; 0 when never selected.
  std::size_t marker_position = 0;
  std::size_t first_instance_position = 0;
  ExplanationTrace trace;

  bool MarkerInWindow() const {
    return marker_position != 0 && marker_position <= window;
  }
  bool InstanceInWindow() const {
    return first_instance_position != 0 && first_instance_position <= window;
  }
};

// 64x64 scene on an 8x8 grid: the instance box covers the centre 4x4
// patches, the marker sits in the top-right patch outside it.
BiasBenchReport RunBiasBench(const BiasBenchOptions& options);

// Passes when the outcome matches the scenario: marker and instance early
// for beta > 0, marker late for beta = 0, marker first without an instance.
bool BiasExpectationHolds(const BiasBenchOptions& options,
                          const BiasBenchReport& report);

int CmdBiasBench(const BiasBenchOptions& options, std::ostream& out,
                 std::ostream& err);

}  // namespace vxcode

#endif  // VXCODE_COMMANDS_H_
