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

#include "vxcode/detector.h"

#include <algorithm>
#include <exception>
#include <thread>
#include <utility>

namespace vxcode {

std::vector<Proposal> Detector::DetectMasked(const Image& image,
                                             const PatchGrid& grid,
                                             const PatchSet& keep) {
  return Detect(MaskApply(image, grid, keep));
}

std::vector<std::vector<Proposal>> Detector::DetectMaskedBatch(
    const Image& image, const PatchGrid& grid,
    std::span<const PatchSet> keeps) {
  std::vector<std::vector<Proposal>> out;
  out.reserve(keeps.size());
  for (const PatchSet& keep : keeps) {
    out.push_back(DetectMasked(image, grid, keep));
  }
  return out;
}

DetectorHandle::DetectorHandle(std::shared_ptr<Detector> detector)
    : detector_(std::move(detector)) {
  if (!detector_) throw std::invalid_argument("detector handle: null detector");
}

std::vector<Proposal> DetectorHandle::Detect(const Image& image) {
  ++evaluations_;
  return detector_->Detect(image);
}

std::vector<Proposal> DetectorHandle::DetectMasked(const Image& image,
                                                   const PatchGrid& grid,
                                                   const PatchSet& keep) {
  ++evaluations_;
  return detector_->DetectMasked(image, grid, keep);
}

std::vector<std::vector<Proposal>> DetectorHandle::DetectMaskedBatch(
    const Image& image, const PatchGrid& grid, std::span<const PatchSet> keeps,
    int threads) {
  evaluations_ += keeps.size();
  const std::size_t workers =
      std::min<std::size_t>(std::max(threads, 1), keeps.size());
  if (workers <= 1 || !detector_->SupportsConcurrentCalls()) {
    return detector_->DetectMaskedBatch(image, grid, keeps);
  }

  std::vector<std::vector<Proposal>> out(keeps.size());
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < keeps.size(); i += workers) {
          out[i] = detector_->DetectMasked(image, grid, keeps[i]);
        }
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

SetFunctionDetector::SetFunctionDetector(Image original, PatchGrid grid,
                                         Value value, BBox box,
                                         int target_class, int num_classes)
    : original_(std::move(original)),
      grid_(grid),
      value_(std::move(value)),
      box_(box),
      target_class_(target_class),
      num_classes_(num_classes) {
  if (grid_.image_width() != original_.width() ||
      grid_.image_height() != original_.height()) {
    throw std::invalid_argument("synthetic detector: grid/image mismatch");
  }
  if (num_classes_ < 1 || target_class_ < 0 || target_class_ >= num_classes_) {
    throw std::invalid_argument("synthetic detector: bad class index");
  }
}

PatchSet SetFunctionDetector::KeptPatches(const Image& image) const {
  std::vector<PatchIndex> kept;
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    const auto idx = static_cast<PatchIndex>(i);
    if (image.RegionEquals(original_, grid_.Rect(idx))) kept.push_back(idx);
  }
  return PatchSet(std::move(kept));
}

std::vector<Proposal> SetFunctionDetector::Detect(const Image& image) {
  if (image.width() != original_.width() ||
      image.height() != original_.height() ||
      image.channels() != original_.channels()) {
    throw DetectorError("synthetic detector: image does not match original");
  }
  Proposal p;
  p.box = box_;
  p.probs.assign(static_cast<std::size_t>(num_classes_), kProbabilityFloor);
  p.probs[static_cast<std::size_t>(target_class_)] =
      std::clamp(value_(KeptPatches(image)), 0.0, 1.0);
  return {std::move(p)};
}

std::shared_ptr<Detector> MakeAdditiveDetector(
    const Image& original, const PatchGrid& grid, std::vector<double> weights,
    const BBox& box, int target_class, int num_classes) {
  for (double w : weights) {
    if (!(w >= 0.0)) {
      throw std::invalid_argument("additive detector: negative weight");
    }
  }
  auto value = [weights = std::move(weights)](const PatchSet& kept) {
    double sum = 0.0;
    for (PatchIndex i : kept) {
      if (i < weights.size()) sum += weights[i];
    }
    return sum;
  };
  return std::make_shared<SetFunctionDetector>(original, grid, std::move(value),
                                               box, target_class, num_classes);
}

std::shared_ptr<Detector> MakeBiasedDetector(
    const Image& original, const PatchGrid& grid,
    std::vector<double> instance_weights, PatchIndex marker_patch,
    double marker_gain, const BBox& box, int target_class, int num_classes) {
  const PixelRect m = grid.Rect(marker_patch);
  const BBox marker_box{static_cast<double>(m.x0), static_cast<double>(m.y0),
                        static_cast<double>(m.x1), static_cast<double>(m.y1)};
  if (Iou(marker_box, box) > 0.0) {
    throw std::invalid_argument("biased detector: marker overlaps the box");
  }
  auto value = [weights = std::move(instance_weights), marker_patch,
                marker_gain](const PatchSet& kept) {
    double sum = kept.Contains(marker_patch) ? marker_gain : 0.0;
    for (PatchIndex i : kept) {
      if (i < weights.size() && i != marker_patch) sum += weights[i];
    }
    return sum;
  };
  return std::make_shared<SetFunctionDetector>(original, grid, std::move(value),
                                               box, target_class, num_classes);
}

}  // namespace vxcode
