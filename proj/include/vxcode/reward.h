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
// Detection similarity rewards. Every reward is a max over proposals and is 0
// for an empty proposal list.
//

#ifndef VXCODE_REWARD_H_
#define VXCODE_REWARD_H_

#include <optional>
#include <span>
#include <string>

#include "vxcode/detector.h"

namespace vxcode {

enum class RewardVariant { kFull, kBoxOnly, kClassOnly, kAlphaWeighted };

std::string ToString(RewardVariant v);
// Accepts "full", "box_only", "class_only", "alpha_weighted".
RewardVariant ParseRewardVariant(const std::string& name);

struct RewardSpec {
  RewardVariant variant = RewardVariant::kFull;
  // Only for kAlphaWeighted; must lie in [0, 1].
  std::optional<double> alpha;
  TargetDetection target;
  // Only for kClassOnly.
  int predicted_class = 0;
  // kClassOnly extension: when set, proposals whose IoU with the target box
  // is below this threshold are ignored.
  std::optional<double> iou_gate;

  // Throws std::invalid_argument when the fields are inconsistent.
  void Validate() const;
};

// p.q / (|p||q|), 0 when either norm is 0. Throws std::invalid_argument on a
// length mismatch.
double Cosine(std::span<const double> p, std::span<const double> q);

// max IoU(target box, B) * cos(target probs, P).
double RewardFull(std::span<const Proposal> proposals,
                  const TargetDetection& target);

// max IoU(target box, B).
double RewardBox(std::span<const Proposal> proposals, const BBox& target_box);

// max P[y]. With `gate`, only proposals with IoU(gate->box, B) >= threshold
// count.
struct IouGate {
  BBox box;
  double threshold = 0.0;
};
double RewardClass(std::span<const Proposal> proposals, int predicted_class,
                   const std::optional<IouGate>& gate = std::nullopt);

// max IoU^(1-alpha) * cos^alpha, with 0^0 = 1.
double RewardAlpha(std::span<const Proposal> proposals,
                   const TargetDetection& target, double alpha);

double EvaluateReward(const RewardSpec& spec,
                      std::span<const Proposal> proposals);

}  // namespace vxcode

#endif  // VXCODE_REWARD_H_
