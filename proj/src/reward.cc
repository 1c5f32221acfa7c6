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

#include "vxcode/reward.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vxcode {

std::string ToString(RewardVariant v) {
  switch (v) {
    case RewardVariant::kFull:
      return "full";
    case RewardVariant::kBoxOnly:
      return "box_only";
    case RewardVariant::kClassOnly:
      return "class_only";
    case RewardVariant::kAlphaWeighted:
      return "alpha_weighted";
  }
  return "unknown";
}

RewardVariant ParseRewardVariant(const std::string& name) {
  if (name == "full") return RewardVariant::kFull;
  if (name == "box_only") return RewardVariant::kBoxOnly;
  if (name == "class_only") return RewardVariant::kClassOnly;
  if (name == "alpha_weighted") return RewardVariant::kAlphaWeighted;
  throw std::invalid_argument("unknown reward variant: " + name);
}

void RewardSpec::Validate() const {
  const bool weighted = variant == RewardVariant::kAlphaWeighted;
  if (weighted != alpha.has_value()) {
    throw std::invalid_argument(
        "reward: alpha must be given exactly for alpha_weighted");
  }
  if (alpha && !(*alpha >= 0.0 && *alpha <= 1.0)) {
    throw std::invalid_argument("reward: alpha outside [0, 1]");
  }
  if (variant == RewardVariant::kClassOnly && predicted_class < 0) {
    throw std::invalid_argument("reward: negative class index");
  }
  if ((variant == RewardVariant::kFull || weighted) && target.probs.empty()) {
    throw std::invalid_argument("reward: target probabilities missing");
  }
}

double Cosine(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) {
    throw std::invalid_argument("cosine: length mismatch");
  }
  double dot = 0.0;
  double pp = 0.0;
  double qq = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    dot += p[i] * q[i];
    pp += p[i] * p[i];
    qq += q[i] * q[i];
  }
  if (pp == 0.0 || qq == 0.0) return 0.0;
  return std::clamp(dot / (std::sqrt(pp) * std::sqrt(qq)), 0.0, 1.0);
}

double RewardFull(std::span<const Proposal> proposals,
                  const TargetDetection& target) {
  double best = 0.0;
  for (const Proposal& p : proposals) {
    best =
        std::max(best, Iou(target.box, p.box) * Cosine(target.probs, p.probs));
  }
  return best;
}

double RewardBox(std::span<const Proposal> proposals, const BBox& target_box) {
  double best = 0.0;
  for (const Proposal& p : proposals) {
    best = std::max(best, Iou(target_box, p.box));
  }
  return best;
}

double RewardClass(std::span<const Proposal> proposals, int predicted_class,
                   const std::optional<IouGate>& gate) {
  double best = 0.0;
  const auto y = static_cast<std::size_t>(predicted_class);
  for (const Proposal& p : proposals) {
    if (predicted_class < 0 || y >= p.probs.size()) {
      throw std::invalid_argument("class reward: class index out of range");
    }
    if (gate && Iou(gate->box, p.box) < gate->threshold) continue;
    best = std::max(best, std::clamp(p.probs[y], 0.0, 1.0));
  }
  return best;
}

namespace {

// x^e with 0^0 = 1.
double PowZeroZeroIsOne(double x, double e) {
  if (e == 0.0) return 1.0;
  return std::pow(x, e);
}

}  // namespace

double RewardAlpha(std::span<const Proposal> proposals,
                   const TargetDetection& target, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("alpha reward: alpha outside [0, 1]");
  }
  double best = 0.0;
  for (const Proposal& p : proposals) {
    const double term = PowZeroZeroIsOne(Iou(target.box, p.box), 1.0 - alpha) *
                        PowZeroZeroIsOne(Cosine(target.probs, p.probs), alpha);
    best = std::max(best, term);
  }
  return best;
}

double EvaluateReward(const RewardSpec& spec,
                      std::span<const Proposal> proposals) {
  switch (spec.variant) {
    case RewardVariant::kFull:
      return RewardFull(proposals, spec.target);
    case RewardVariant::kBoxOnly:
      return RewardBox(proposals, spec.target.box);
    case RewardVariant::kClassOnly: {
      std::optional<IouGate> gate;
      if (spec.iou_gate) gate = IouGate{spec.target.box, *spec.iou_gate};
      return RewardClass(proposals, spec.predicted_class, gate);
    }
    case RewardVariant::kAlphaWeighted:
      return RewardAlpha(proposals, spec.target, spec.alpha.value_or(0.5));
  }
  return 0.0;
}

}  // namespace vxcode
