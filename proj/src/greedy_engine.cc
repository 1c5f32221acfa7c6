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

#include "vxcode/greedy_engine.h"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace vxcode {

std::string ToString(Mode mode) {
  return mode == Mode::kInsertion ? "insertion" : "deletion";
}

Mode ParseMode(const std::string& name) {
  if (name == "insertion") return Mode::kInsertion;
  if (name == "deletion") return Mode::kDeletion;
  throw std::invalid_argument("unknown mode: " + name);
}

void EngineConfig::Validate() const {
  if (r < 1) throw std::invalid_argument("engine: r must be >= 1");
  if (top_l < 1) throw std::invalid_argument("engine: L must be >= 1");
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw std::invalid_argument("engine: gamma outside [0, 1]");
  }
  if (threads < 1) throw std::invalid_argument("engine: threads must be >= 1");
  reward.Validate();
}

std::vector<PatchIndex> ExplanationTrace::Order() const {
  std::vector<PatchIndex> order;
  for (const TraceStep& step : steps) {
    order.insert(order.end(), step.selected.begin(), step.selected.end());
  }
  return order;
}

std::uint64_t ExplanationTrace::TotalEvaluations() const {
  std::uint64_t total = 0;
  for (const TraceStep& step : steps) total += step.evaluations;
  return total;
}

PatchSet SelectTopL(std::span<const ScoredPatch> scores, std::size_t top_l) {
  std::vector<ScoredPatch> ranked(scores.begin(), scores.end());
  const std::size_t keep = std::min(top_l, ranked.size());
  std::partial_sort(ranked.begin(), ranked.begin() + keep, ranked.end(),
                    [](const ScoredPatch& a, const ScoredPatch& b) {
                      if (a.score != b.score) return a.score > b.score;
                      return a.patch < b.patch;
                    });
  std::vector<PatchIndex> out;
  out.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) out.push_back(ranked[i].patch);
  return PatchSet(std::move(out));
}

std::uint64_t Binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t result = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    // result * (n - k + i) / i stays integral at every step.
    const unsigned __int128 next =
        static_cast<unsigned __int128>(result) * (n - k + i) / i;
    if (next > std::numeric_limits<std::uint64_t>::max()) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    result = static_cast<std::uint64_t>(next);
  }
  return result;
}

namespace {

bool CombiningStep(std::size_t identified, std::size_t n, int r, double gamma) {
  return r >= 2 &&
         static_cast<double>(identified) <= gamma * static_cast<double>(n);
}

// Pool size for the combination search. Never smaller than r so that a
// combining step always has at least one r-subset.
std::size_t PoolSize(std::size_t remaining, int r, int top_l) {
  return std::min<std::size_t>(remaining,
                               static_cast<std::size_t>(std::max(top_l, r)));
}

// All r-subsets of `pool` in lexicographic order of their sorted index
// tuples.
std::vector<PatchSet> Combinations(const PatchSet& pool, int r) {
  std::vector<PatchSet> out;
  const std::size_t m = pool.size();
  const auto k = static_cast<std::size_t>(r);
  if (k > m) return out;
  std::vector<std::size_t> pick(k);
  for (std::size_t i = 0; i < k; ++i) pick[i] = i;
  std::vector<PatchIndex> members(k);
  while (true) {
    for (std::size_t i = 0; i < k; ++i) members[i] = pool[pick[i]];
    out.emplace_back(members);
    std::size_t i = k;
    while (i > 0 && pick[i - 1] == m - k + (i - 1)) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
  }
  return out;
}

// Index of the best value; the first one wins ties.
std::size_t BestIndex(std::span<const double> values, bool maximize) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (maximize ? values[i] > values[best] : values[i] < values[best]) {
      best = i;
    }
  }
  return best;
}

}  // namespace

ExplanationTrace RunGreedy(const BatchReward& reward, const PatchGrid& grid,
                           const PatchSet& candidates,
                           const EngineConfig& config) {
  config.Validate();
  if (candidates.empty()) {
    throw std::invalid_argument("engine: empty candidate set");
  }
  const PatchSet universe = PatchSet::Range(grid.size());
  if (!candidates.IsSubsetOf(universe)) {
    throw std::invalid_argument("engine: candidate index outside the grid");
  }

  const bool insertion = config.mode == Mode::kInsertion;
  // Patches visible when `identified` has been inserted or deleted.
  auto visible = [&](const PatchSet& identified) {
    return insertion ? identified : universe.Difference(identified);
  };
  auto evaluate = [&](const std::vector<PatchSet>& identified_sets) {
    std::vector<PatchSet> keeps;
    keeps.reserve(identified_sets.size());
    for (const PatchSet& s : identified_sets) keeps.push_back(visible(s));
    std::vector<double> values = reward(keeps);
    if (values.size() != keeps.size()) {
      throw std::logic_error("engine: reward batch size mismatch");
    }
    return values;
  };

  ExplanationTrace trace;
  trace.mode = config.mode;
  trace.grid = grid;
  trace.candidates = candidates;

  try {
    const std::size_t n = candidates.size();
    PatchSet identified;
    PatchSet remaining = candidates;
    int r = config.r;
    while (!remaining.empty()) {
      if (remaining.size() < static_cast<std::size_t>(r)) {
        r = static_cast<int>(remaining.size());
      }

      std::vector<PatchSet> singles;
      singles.reserve(remaining.size());
      for (PatchIndex b : remaining) singles.push_back(identified.With(b));
      const std::vector<double> single_values = evaluate(singles);

      TraceStep step;
      if (CombiningStep(identified.size(), n, r, config.gamma)) {
        std::vector<ScoredPatch> scores;
        scores.reserve(remaining.size());
        for (std::size_t i = 0; i < remaining.size(); ++i) {
          scores.push_back(
              {remaining[i], insertion ? single_values[i] : -single_values[i]});
        }
        const PatchSet pool =
            SelectTopL(scores, PoolSize(remaining.size(), r, config.top_l));
        const std::vector<PatchSet> combos = Combinations(pool, r);
        std::vector<PatchSet> extended;
        extended.reserve(combos.size());
        for (const PatchSet& c : combos)
          extended.push_back(identified.Union(c));
        const std::vector<double> values = evaluate(extended);
        const std::size_t best = BestIndex(values, insertion);
        step.selected = combos[best];
        step.reward_after = values[best];
        step.evaluations = singles.size() + combos.size();
      } else {
        const std::size_t best = BestIndex(single_values, insertion);
        step.selected = PatchSet{remaining[best]};
        step.reward_after = single_values[best];
        step.evaluations = singles.size();
      }
      identified = identified.Union(step.selected);
      remaining = remaining.Difference(step.selected);
      trace.steps.push_back(std::move(step));
    }

    if (candidates.size() < universe.size()) {
      TraceStep tail;
      tail.selected = universe.Difference(candidates);
      tail.appended = true;
      trace.steps.push_back(std::move(tail));
    }
    trace.complete = true;
  } catch (const DetectorError& e) {
    trace.error = e.what();
  } catch (const TransportError& e) {
    trace.error = e.what();
  }
  return trace;
}

namespace {

ExplanationTrace RunWithDetector(DetectorHandle& detector, const Image& image,
                                 const PatchGrid& grid,
                                 const PatchSet& candidates,
                                 const EngineConfig& config) {
  BatchReward reward = [&](std::span<const PatchSet> keeps) {
    const auto outputs =
        detector.DetectMaskedBatch(image, grid, keeps, config.threads);
    std::vector<double> values;
    values.reserve(outputs.size());
    for (const auto& proposals : outputs) {
      values.push_back(EvaluateReward(config.reward, proposals));
    }
    return values;
  };
  return RunGreedy(reward, grid, candidates, config);
}

}  // namespace

ExplanationTrace InsertRun(DetectorHandle& detector, const Image& image,
                           const PatchGrid& grid, const PatchSet& candidates,
                           const EngineConfig& config) {
  if (config.mode != Mode::kInsertion) {
    throw std::invalid_argument("insert run: config mode is not insertion");
  }
  return RunWithDetector(detector, image, grid, candidates, config);
}

ExplanationTrace DeleteRun(DetectorHandle& detector, const Image& image,
                           const PatchGrid& grid, const PatchSet& candidates,
                           const EngineConfig& config) {
  if (config.mode != Mode::kDeletion) {
    throw std::invalid_argument("delete run: config mode is not deletion");
  }
  return RunWithDetector(detector, image, grid, candidates, config);
}

ExplanationTrace ExplainRun(DetectorHandle& detector, const Image& image,
                            const PatchGrid& grid, const PatchSet& candidates,
                            const EngineConfig& config) {
  return config.mode == Mode::kInsertion
             ? InsertRun(detector, image, grid, candidates, config)
             : DeleteRun(detector, image, grid, candidates, config);
}

std::uint64_t EvaluationBudget(std::size_t n, int r, int top_l, double gamma) {
  std::uint64_t total = 0;
  std::size_t identified = 0;
  while (identified < n) {
    const std::size_t remaining = n - identified;
    const int step_r =
        static_cast<int>(std::min<std::size_t>(remaining, std::max(r, 1)));
    total += remaining;
    if (CombiningStep(identified, n, step_r, gamma)) {
      total += Binomial(PoolSize(remaining, step_r, top_l),
                        static_cast<std::uint64_t>(step_r));
      identified += static_cast<std::size_t>(step_r);
    } else {
      identified += 1;
    }
  }
  return total;
}

namespace {

std::string JoinIndices(const PatchSet& s) {
  if (s.empty()) return "-";
  return fmt::format("{}", fmt::join(s.indices(), ","));
}

PatchSet ParseIndices(const std::string& field) {
  std::vector<PatchIndex> out;
  if (field == "-") return PatchSet{};
  std::stringstream ss(field);
  std::string item;
  while (std::getline(ss, item, ',')) {
    PatchIndex v = 0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || ptr != item.data() + item.size()) {
      throw std::invalid_argument("trace: bad patch index '" + item + "'");
    }
    out.push_back(v);
  }
  return PatchSet(std::move(out));
}

std::vector<std::string> SplitTabs(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, '\t')) fields.push_back(f);
  return fields;
}

void WriteStep(std::ostream& out, std::size_t index, const TraceStep& step,
               const char* kind) {
  const std::string reward =
      step.reward_after ? fmt::format("{}", *step.reward_after) : "-";
  out << fmt::format("{}\t{}\t{}\t{}\t{}\n", index, JoinIndices(step.selected),
                     reward, step.evaluations, kind);
}

}  // namespace

void WriteTrace(const ExplanationTrace& trace, std::ostream& out) {
  out << "# vxcode trace v1\n";
  out << "mode\t" << ToString(trace.mode) << "\n";
  out << fmt::format("grid\t{}\t{}\t{}\t{}\n", trace.grid.image_width(),
                     trace.grid.image_height(), trace.grid.rows(),
                     trace.grid.cols());
  out << "candidates\t" << JoinIndices(trace.candidates) << "\n";
  out << "complete\t" << (trace.complete ? "true" : "false") << "\n";
  if (!trace.error.empty()) out << "error\t" << trace.error << "\n";
  out << "step\tselected\treward\tevaluations\tkind\n";
  for (std::size_t k = 0; k < trace.steps.size(); ++k) {
    WriteStep(out, k + 1, trace.steps[k],
              trace.steps[k].appended ? "appended" : "greedy");
  }
}

ExplanationTrace ReadTrace(std::istream& in) {
  ExplanationTrace trace;
  std::string line;
  bool in_steps = false;
  bool saw_grid = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto f = SplitTabs(line);
    if (!in_steps) {
      if (f[0] == "mode" && f.size() == 2) {
        trace.mode = ParseMode(f[1]);
      } else if (f[0] == "grid" && f.size() == 5) {
        trace.grid = PatchGrid(std::stoi(f[1]), std::stoi(f[2]),
                               std::stoi(f[3]), std::stoi(f[4]));
        saw_grid = true;
      } else if (f[0] == "candidates" && f.size() == 2) {
        trace.candidates = ParseIndices(f[1]);
      } else if (f[0] == "complete" && f.size() == 2) {
        trace.complete = f[1] == "true";
      } else if (f[0] == "error" && f.size() >= 2) {
        trace.error = line.substr(6);
      } else if (f[0] == "step") {
        in_steps = true;
      } else {
        throw std::invalid_argument("trace: unexpected line '" + line + "'");
      }
      continue;
    }
    if (f.size() != 5) {
      throw std::invalid_argument("trace: malformed step '" + line + "'");
    }
    TraceStep step;
    step.selected = ParseIndices(f[1]);
    if (f[2] != "-") step.reward_after = std::stod(f[2]);
    step.evaluations = std::stoull(f[3]);
    step.appended = f[4] == "appended";
    if (f[4] == "greedy" || f[4] == "appended") {
      trace.steps.push_back(step);
    } else {
      throw std::invalid_argument("trace: unknown step kind '" + f[4] + "'");
    }
  }
  if (!saw_grid) throw std::invalid_argument("trace: missing grid line");
  return trace;
}

void ValidateTrace(const ExplanationTrace& trace) {
  PatchSet covered;
  PatchSet greedy;
  for (const TraceStep& step : trace.steps) {
    if (step.selected.empty()) {
      throw std::invalid_argument("trace: empty step");
    }
    if (covered.Union(step.selected).size() !=
        covered.size() + step.selected.size()) {
      throw std::invalid_argument("trace: steps overlap");
    }
    covered = covered.Union(step.selected);
    if (!step.appended) greedy = greedy.Union(step.selected);
    if (step.appended) {
      if (step.reward_after) {
        throw std::invalid_argument("trace: appended step carries a reward");
      }
    } else if (!step.reward_after ||
               !(*step.reward_after >= 0.0 && *step.reward_after <= 1.0)) {
      throw std::invalid_argument("trace: reward missing or outside [0, 1]");
    }
  }
  if (trace.complete) {
    if (greedy != trace.candidates) {
      throw std::invalid_argument(
          "trace: greedy steps do not cover candidates");
    }
    if (covered != PatchSet::Range(trace.grid.size())) {
      throw std::invalid_argument("trace: steps do not cover the grid");
    }
  }
}

}  // namespace vxcode
