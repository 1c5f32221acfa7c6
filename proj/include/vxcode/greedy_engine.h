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
// Greedy patch insertion and deletion.
//
// Each step adds r patches to the identified set S. While |S| <= gamma * |N|
// and r >= 2, a step first scores every remaining patch on its own (one
// forward pass each), keeps the best L, and then evaluates every r-subset of
// those L patches. All other steps pick a single patch by exhaustive scan.
// Insertion maximizes the reward of the image showing only S; deletion
// minimizes the reward of the image with S removed.
//
// Ties always go to the lowest patch index (lexicographically smallest index
// tuple for r-subsets), so traces do not depend on evaluation order.
//

#ifndef VXCODE_GREEDY_ENGINE_H_
#define VXCODE_GREEDY_ENGINE_H_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vxcode/detector.h"
#include "vxcode/geometry.h"
#include "vxcode/image.h"
#include "vxcode/reward.h"

namespace vxcode {

enum class Mode { kInsertion, kDeletion };

std::string ToString(Mode mode);
Mode ParseMode(const std::string& name);

struct EngineConfig {
  int r = 1;
  int top_l = 30;
  double gamma = 0.1;
  Mode mode = Mode::kInsertion;
  RewardSpec reward;
  // Evaluation threads; only used when the detector supports concurrent
  // calls.
  int threads = 1;

  void Validate() const;
};

struct TraceStep {
  PatchSet selected;
  // Unset for the appended step, which is never scored.
  std::optional<double> reward_after;
  std::uint64_t evaluations = 0;
  // Non-candidate patches appended after the greedy loop.
  bool appended = false;

  friend bool operator==(const TraceStep&, const TraceStep&) = default;
};

struct ExplanationTrace {
  Mode mode = Mode::kInsertion;
  PatchGrid grid{1, 1, 1, 1};
  PatchSet candidates;
  std::vector<TraceStep> steps;
  bool complete = false;
  std::string error;

  // Patches in selection order, ascending within a step.
  std::vector<PatchIndex> Order() const;
  // Detector evaluations spent by the search; the appended step costs none.
  std::uint64_t TotalEvaluations() const;

  friend bool operator==(const ExplanationTrace&,
                         const ExplanationTrace&) = default;
};

struct ScoredPatch {
  PatchIndex patch;
  double score;
};

// The `top_l` highest-scoring patches (all of them if fewer); ties go to the
// lower index.
PatchSet SelectTopL(std::span<const ScoredPatch> scores, std::size_t top_l);

// Reward of a batch of keep-sets (patches left visible), in input order.
using BatchReward =
    std::function<std::vector<double>(std::span<const PatchSet>)>;

// Greedy loop over an arbitrary set function. `universe` is the full patch
// set N; the loop runs over `candidates` only and appends the rest as a
// single final step. Detector failures (DetectorError, TransportError) stop
// the run and return the partial trace with complete == false.
ExplanationTrace RunGreedy(const BatchReward& reward, const PatchGrid& grid,
                           const PatchSet& candidates,
                           const EngineConfig& config);

ExplanationTrace InsertRun(DetectorHandle& detector, const Image& image,
                           const PatchGrid& grid, const PatchSet& candidates,
                           const EngineConfig& config);

ExplanationTrace DeleteRun(DetectorHandle& detector, const Image& image,
                           const PatchGrid& grid, const PatchSet& candidates,
                           const EngineConfig& config);

// Dispatches on config.mode.
ExplanationTrace ExplainRun(DetectorHandle& detector, const Image& image,
                            const PatchGrid& grid, const PatchSet& candidates,
                            const EngineConfig& config);

// Forward passes the greedy steps need for n candidates: a combining step
// costs |N \ S| + C(min(max(L, r), |N \ S|), r), a single step |N \ S|.
std::uint64_t EvaluationBudget(std::size_t n, int r, int top_l, double gamma);

// n choose k, saturating at UINT64_MAX.
std::uint64_t Binomial(std::uint64_t n, std::uint64_t k);

// Tab-separated trace file; see README for the layout.
void WriteTrace(const ExplanationTrace& trace, std::ostream& out);
ExplanationTrace ReadTrace(std::istream& in);

// Throws std::invalid_argument when steps overlap, leave candidates
// uncovered, or carry rewards outside [0, 1].
void ValidateTrace(const ExplanationTrace& trace);

}  // namespace vxcode

#endif  // VXCODE_GREEDY_ENGINE_H_
