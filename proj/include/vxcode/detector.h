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
// Black-box detector interface and deterministic synthetic detectors.
//

#ifndef VXCODE_DETECTOR_H_
#define VXCODE_DETECTOR_H_

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "vxcode/geometry.h"
#include "vxcode/image.h"

namespace vxcode {

// One detector output: a box and a nonnegative per-class score vector.
struct Proposal {
  BBox box;
  std::vector<double> probs;

  friend bool operator==(const Proposal&, const Proposal&) = default;
};

// The detection being explained.
struct TargetDetection {
  BBox box;
  std::vector<double> probs;
};

// The detector rejected a request (bad input, unknown model, ...).
class DetectorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The channel to an external detector broke. Never reported as an empty
// detection.
class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Opaque, deterministic image -> proposals map.
class Detector {
 public:
  virtual ~Detector() = default;

  virtual std::vector<Proposal> Detect(const Image& image) = 0;

  // Detection on `image` with every patch outside `keep` zero-filled.
  // Masking always happens on the raw pixels, before any preprocessing the
  // detector applies.
  virtual std::vector<Proposal> DetectMasked(const Image& image,
                                             const PatchGrid& grid,
                                             const PatchSet& keep);

  // Default runs DetectMasked sequentially. External detectors override this
  // to pipeline requests.
  virtual std::vector<std::vector<Proposal>> DetectMaskedBatch(
      const Image& image, const PatchGrid& grid,
      std::span<const PatchSet> keeps);

  // Whether Detect/DetectMasked may be called from several threads at once.
  virtual bool SupportsConcurrentCalls() const { return false; }
};

// Shared detector plus an exact count of forward passes.
class DetectorHandle {
 public:
  explicit DetectorHandle(std::shared_ptr<Detector> detector);
  DetectorHandle(const DetectorHandle&) = delete;
  DetectorHandle& operator=(const DetectorHandle&) = delete;

  std::vector<Proposal> Detect(const Image& image);
  std::vector<Proposal> DetectMasked(const Image& image, const PatchGrid& grid,
                                     const PatchSet& keep);

  // Results are in the order of `keeps` regardless of `threads`. Threads are
  // only used when the detector declares concurrent support.
  std::vector<std::vector<Proposal>> DetectMaskedBatch(
      const Image& image, const PatchGrid& grid,
      std::span<const PatchSet> keeps, int threads = 1);

  std::uint64_t evaluations() const { return evaluations_.load(); }
  void ResetEvaluations() { evaluations_.store(0); }
  bool concurrent() const { return detector_->SupportsConcurrentCalls(); }
  Detector& detector() { return *detector_; }

 private:
  std::shared_ptr<Detector> detector_;
  std::atomic<std::uint64_t> evaluations_{0};
};

// Floor on non-target classes of synthetic detectors.
inline constexpr double kProbabilityFloor = 1e-6;

// Synthetic detector driven by a set function over the patches of a stored
// original image. A patch counts as kept when all of its pixels equal the
// original; the detector returns one proposal at `box` whose target-class
// score is clamp(value(kept), 0, 1) and whose other classes sit at
// kProbabilityFloor.
class SetFunctionDetector : public Detector {
 public:
  using Value = std::function<double(const PatchSet&)>;

  SetFunctionDetector(Image original, PatchGrid grid, Value value, BBox box,
                      int target_class, int num_classes);

  std::vector<Proposal> Detect(const Image& image) override;
  bool SupportsConcurrentCalls() const override { return true; }

  // Patches of `image` identical to the original.
  PatchSet KeptPatches(const Image& image) const;

 private:
  Image original_;
  PatchGrid grid_;
  Value value_;
  BBox box_;
  int target_class_;
  int num_classes_;
};

// Score = sum of weights of kept patches. `weights` is indexed by patch;
// missing entries count as 0.
std::shared_ptr<Detector> MakeAdditiveDetector(
    const Image& original, const PatchGrid& grid, std::vector<double> weights,
    const BBox& box, int target_class, int num_classes);

// Score = marker_gain * [marker kept] + sum of instance weights of kept
// patches. Emulates a detector that learned to rely on a feature outside the
// object. Throws std::invalid_argument if the marker lies inside `box`.
std::shared_ptr<Detector> MakeBiasedDetector(
    const Image& original, const PatchGrid& grid,
    std::vector<double> instance_weights, PatchIndex marker_patch,
    double marker_gain, const BBox& box, int target_class, int num_classes);

}  // namespace vxcode

#endif  // VXCODE_DETECTOR_H_
