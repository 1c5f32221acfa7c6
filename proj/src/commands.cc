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

#include "vxcode/commands.h"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include "vxcode/game_oracle.h"
#include "vxcode/heatmap.h"
#include "vxcode/metrics.h"
#include "vxcode/random.h"
#include "vxcode/sidecar_client.h"

namespace vxcode {

namespace fs = std::filesystem;

Image SyntheticImage(int width, int height, int channels, std::uint64_t seed) {
  Image image(width, height, channels);
  SplitMix64 rng(seed);
  for (float& v : image.data()) {
    v = static_cast<float>(1 + rng.Below(255)) / 255.0f;
  }
  return image;
}

namespace {

Image LoadImage(const RunConfig& config) {
  if (!config.image_path) {
    return SyntheticImage(config.image_width, config.image_height,
                          config.image_channels, config.seed);
  }
  const std::string& path = *config.image_path;
  if (!fs::exists(path)) throw ConfigError("image file not found: " + path);
  try {
    return ReadPng(path);
  } catch (const std::exception& e) {
    throw ConfigError("cannot read image " + path + ": " + e.what());
  }
}

// The proposal the explanation is about when the config does not pin it.
const Proposal& PickProposal(const std::vector<Proposal>& proposals,
                             const RewardSpec& reward) {
  if (proposals.empty()) {
    throw DetectorError("detector returned no proposals on the full image");
  }
  auto score = [&](const Proposal& p) {
    if (reward.variant == RewardVariant::kClassOnly) {
      const auto c = static_cast<std::size_t>(reward.predicted_class);
      return c < p.probs.size() ? p.probs[c] : 0.0;
    }
    return p.probs.empty() ? 0.0
                           : *std::max_element(p.probs.begin(), p.probs.end());
  };
  const Proposal* best = &proposals.front();
  for (const Proposal& p : proposals) {
    if (score(p) > score(*best)) best = &p;
  }
  return *best;
}

void EnsureDir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir);
}

void WriteTraceFile(const ExplanationTrace& trace, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  WriteTrace(trace, out);
}

std::optional<double> FinalReward(const ExplanationTrace& trace) {
  for (auto it = trace.steps.rbegin(); it != trace.steps.rend(); ++it) {
    if (it->reward_after) return it->reward_after;
  }
  return std::nullopt;
}

}  // namespace

Scene BuildScene(const RunConfig& config) {
  Scene scene;
  scene.image = LoadImage(config);
  const int w = scene.image.width();
  const int h = scene.image.height();
  const DetectorSource& src = config.detector;
  scene.engine = config.engine;

  // Synthetic detectors need the grid up front; their box is the target.
  std::optional<PatchGrid> grid;
  if (config.grid_rows) {
    try {
      grid = PatchGrid(w, h, *config.grid_rows, *config.grid_cols);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  if (src.kind == DetectorKind::kSidecar) {
    scene.detector = std::make_shared<SidecarDetector>(src.command, src.name);
  } else {
    if (!grid) grid = MakeGrid(w, h, config.target_box.value_or(src.box));
    const std::size_t n = grid->size();
    if (src.kind == DetectorKind::kAdditive) {
      if (src.weights.size() != n) {
        throw ConfigError(
            fmt::format("detector.weights: {} weights for a grid of {} patches",
                        src.weights.size(), n));
      }
      try {
        scene.detector =
            MakeAdditiveDetector(scene.image, *grid, src.weights, src.box,
                                 src.target_class, src.num_classes);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
    } else {
      std::vector<double> weights = src.weights;
      if (weights.empty()) weights.assign(n, 0.0);
      if (weights.size() != n || src.marker_patch >= n) {
        throw ConfigError(
            "detector: instance weights or marker do not fit "
            "the grid");
      }
      try {
        scene.detector = MakeBiasedDetector(
            scene.image, *grid, std::move(weights), src.marker_patch,
            src.marker_gain, src.box, src.target_class, src.num_classes);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
    }
  }

  if (config.target_box && config.target_probs) {
    scene.target = {*config.target_box, *config.target_probs};
  } else {
    const std::vector<Proposal> found = scene.detector->Detect(scene.image);
    const Proposal& pick = PickProposal(found, config.engine.reward);
    scene.target.box = config.target_box.value_or(pick.box);
    scene.target.probs = config.target_probs.value_or(pick.probs);
  }
  scene.engine.reward.target = scene.target;
  try {
    scene.engine.Validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  scene.grid = grid ? *grid : MakeGrid(w, h, scene.target.box);
  scene.candidates = config.restrict_candidates
                         ? CandidatePatches(scene.grid, scene.target.box)
                         : PatchSet::Range(scene.grid.size());
  if (scene.candidates.empty()) {
    throw ConfigError("no candidate patches for the target box");
  }
  return scene;
}

int CmdExplain(const RunConfig& config, std::ostream& out, std::ostream& err) {
  Scene scene;
  try {
    scene = BuildScene(config);
    EnsureDir(config.output_dir);
  } catch (const ConfigError& e) {
    fmt::print(err, "error[config]: {}\n", e.what());
    return kExitUsage;
  } catch (const DetectorError& e) {
    fmt::print(err, "error[detector]: {}\n", e.what());
    return kExitRuntime;
  } catch (const TransportError& e) {
    fmt::print(err, "error[transport]: {}\n", e.what());
    return kExitRuntime;
  }

  DetectorHandle detector(scene.detector);
  const ExplanationTrace trace = ExplainRun(detector, scene.image, scene.grid,
                                            scene.candidates, scene.engine);
  const fs::path dir(config.output_dir);
  WriteTraceFile(trace, (dir / "trace.tsv").string());
  if (!trace.complete) {
    fmt::print(err, "error[detector]: {}\n", trace.error);
    return kExitRuntime;
  }
  ExportRaster(BuildHeatMap(trace), (dir / "heatmap.pgm").string(),
               (dir / "heatmap.csv").string());

  const std::string summary = fmt::format(
      "n\t{}\nr\t{}\nL\t{}\ngamma\t{}\nmode\t{}\nevaluations\t{}\n"
      "final_reward\t{}\n",
      scene.candidates.size(), scene.engine.r, scene.engine.top_l,
      scene.engine.gamma, ToString(scene.engine.mode), detector.evaluations(),
      FinalReward(trace).value_or(0.0));
  std::ofstream((dir / "summary.tsv").string(), std::ios::binary) << summary;
  out << summary;
  return kExitOk;
}

int CmdEvaluate(const RunConfig& config, const std::string& input,
                std::ostream& out, std::ostream& err) {
  Scene scene;
  std::vector<PatchIndex> order;
  std::optional<HeatMap> map;
  try {
    scene = BuildScene(config);
    EnsureDir(config.output_dir);
    std::ifstream in(input, std::ios::binary);
    if (!in) throw ConfigError("cannot read input: " + input);
    std::string first;
    std::getline(in, first);
    if (first.rfind("# vxcode trace", 0) == 0) {
      in.seekg(0);
      const ExplanationTrace trace = ReadTrace(in);
      if (trace.grid.image_width() != scene.image.width() ||
          trace.grid.image_height() != scene.image.height()) {
        throw ConfigError("trace grid does not match the image size");
      }
      scene.grid = trace.grid;
      map = BuildHeatMap(trace);
      order = trace.Order();
    } else {
      map = ReadHeatMapCsv(input);
      if (map->width() != scene.image.width() ||
          map->height() != scene.image.height()) {
        throw ConfigError("heat map does not match the image size");
      }
      order = OrderFromHeatMap(*map, scene.grid);
    }
  } catch (const ConfigError& e) {
    fmt::print(err, "error[config]: {}\n", e.what());
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    fmt::print(err, "error[input]: {}\n", e.what());
    return kExitUsage;
  } catch (const DetectorError& e) {
    fmt::print(err, "error[detector]: {}\n", e.what());
    return kExitRuntime;
  } catch (const TransportError& e) {
    fmt::print(err, "error[transport]: {}\n", e.what());
    return kExitRuntime;
  }

  DetectorHandle detector(scene.detector);
  Curve insertion, deletion;
  try {
    insertion = PerturbationCurve(detector, scene.image, scene.grid, order,
                                  Mode::kInsertion, scene.engine.reward);
    deletion = PerturbationCurve(detector, scene.image, scene.grid, order,
                                 Mode::kDeletion, scene.engine.reward);
  } catch (const DetectorError& e) {
    fmt::print(err, "error[detector]: {}\n", e.what());
    return kExitRuntime;
  } catch (const TransportError& e) {
    fmt::print(err, "error[transport]: {}\n", e.what());
    return kExitRuntime;
  }

  const GroundTruthRegion gt(config.ground_truth.value_or(scene.target.box));
  const double ins = Auc(insertion);
  const double del = Auc(deletion);
  const bool pg = PointingGame(*map, gt);
  const double epg = EnergyPointingGame(*map, gt);

  const fs::path dir(config.output_dir);
  WriteCurveCsv(insertion, (dir / "insertion_curve.csv").string());
  WriteCurveCsv(deletion, (dir / "deletion_curve.csv").string());
  std::ofstream((dir / "metrics.csv").string(), std::ios::binary)
      << fmt::format(
             "insertion_auc,deletion_auc,overall,pointing_game,energy_pointing_"
             "game\n"
             "{},{},{},{},{}\n",
             ins, del, Overall(ins, del), pg ? 1 : 0, epg);

  fmt::print(out, "{:<22}{:>10}\n", "metric", "value");
  fmt::print(out, "{:<22}{:>10.4f}\n", "insertion AUC", ins);
  fmt::print(out, "{:<22}{:>10.4f}\n", "deletion AUC", del);
  fmt::print(out, "{:<22}{:>10.4f}\n", "over-all", Overall(ins, del));
  fmt::print(out, "{:<22}{:>10}\n", "pointing game", pg ? "hit" : "miss");
  fmt::print(out, "{:<22}{:>10.4f}\n", "energy pointing game", epg);
  return kExitOk;
}

int CmdOracle(int n, int trials, std::uint64_t seed, bool corrupt,
              std::ostream& out, std::ostream& err) {
  if (trials < 1) {
    fmt::print(err, "error[usage]: trials must be >= 1\n");
    return kExitUsage;
  }
  IdentityReport report;
  try {
    report = RunIdentitySuite(n, trials, seed, corrupt);
  } catch (const GameSizeError& e) {
    fmt::print(err, "error[size]: {}\n", e.what());
    return kExitUsage;
  }
  const double worst = report.MaxResidual();
  fmt::print(out,
             "n\t{}\ntrials\t{}\nchecks\t{}\nmax_insertion\t{:.3e}\n"
             "max_deletion\t{:.3e}\nmax_expansion\t{:.3e}\n"
             "max_efficiency\t{:.3e}\nmax_residual\t{:.3e}\n",
             report.n, report.trials, report.checks, report.max_insertion,
             report.max_deletion, report.max_expansion, report.max_efficiency,
             worst);
  if (!(worst < 1e-12)) {
    fmt::print(err, "error[verification]: residual {:.3e} exceeds 1e-12\n",
               worst);
    return kExitVerification;
  }
  return kExitOk;
}

BiasBenchReport RunBiasBench(const BiasBenchOptions& options) {
  constexpr int kSize = 64;
  constexpr int kClasses = 3;
  const BBox box{16, 16, 48, 48};
  const Image image = SyntheticImage(kSize, kSize, 3, options.seed);
  const PatchGrid grid = MakeGrid(kSize, kSize, box);

  BiasBenchReport report;
  report.n = grid.size();
  report.window = (report.n + 9) / 10;
  report.marker_patch = static_cast<PatchIndex>(grid.cols() - 1);

  std::vector<PatchIndex> inside;
  for (PatchIndex i = 0; i < grid.size(); ++i) {
    const PixelRect r = grid.Rect(i);
    if (r.x0 >= box.x2 || r.x1 <= box.x1 || r.y0 >= box.y2 || r.y1 <= box.y1) {
      continue;
    }
    inside.push_back(i);
  }
  report.instance_patches = PatchSet(inside);

  // Instance weights: positive, summing to 0.5.
  std::vector<double> weights(grid.size(), 0.0);
  if (options.with_instance) {
    SplitMix64 rng(options.seed ^ 0x5eedULL);
    double total = 0.0;
    for (PatchIndex i : inside) {
      weights[i] = 0.5 + rng.Uniform();
      total += weights[i];
    }
    for (PatchIndex i : inside) weights[i] *= 0.5 / total;
  }

  auto detector_ptr =
      MakeBiasedDetector(image, grid, weights, report.marker_patch,
                         options.beta, box, 0, kClasses);
  DetectorHandle detector(detector_ptr);
  const std::vector<Proposal> own = detector.Detect(image);

  EngineConfig engine;
  engine.r = 1;
  engine.mode = Mode::kInsertion;
  engine.reward.variant = RewardVariant::kFull;
  engine.reward.target = {own.front().box, own.front().probs};
  report.trace =
      ExplainRun(detector, image, grid, CandidatePatches(grid, box), engine);

  const std::vector<PatchIndex> order = report.trace.Order();
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (order[k] == report.marker_patch && report.marker_position == 0) {
      report.marker_position = k + 1;
    }
    if (report.instance_patches.Contains(order[k]) &&
        report.first_instance_position == 0) {
      report.first_instance_position = k + 1;
    }
  }
  return report;
}

bool BiasExpectationHolds(const BiasBenchOptions& options,
                          const BiasBenchReport& report) {
  if (!report.trace.complete) return false;
  if (options.beta == 0.0) return !report.MarkerInWindow();
  if (!options.with_instance) return report.marker_position == 1;
  return report.MarkerInWindow() && report.InstanceInWindow();
}

int CmdBiasBench(const BiasBenchOptions& options, std::ostream& out,
                 std::ostream& err) {
  if (!(options.beta >= 0.0 && options.beta <= 0.5)) {
    fmt::print(err, "error[usage]: beta must lie in [0, 0.5]\n");
    return kExitUsage;
  }
  const BiasBenchReport report = RunBiasBench(options);
  if (options.output_dir) {
    try {
      EnsureDir(*options.output_dir);
    } catch (const ConfigError& e) {
      fmt::print(err, "error[config]: {}\n", e.what());
      return kExitUsage;
    }
    const fs::path dir(*options.output_dir);
    WriteTraceFile(report.trace, (dir / "trace.tsv").string());
    ExportRaster(BuildHeatMap(report.trace), (dir / "heatmap.pgm").string(),
                 (dir / "heatmap.csv").string());
  }
  const bool ok = BiasExpectationHolds(options, report);
  fmt::print(out,
             "n\t{}\nwindow\t{}\nbeta\t{}\ninstance\t{}\nmarker_patch\t{}\n"
             "marker_position\t{}\nfirst_instance_position\t{}\nresult\t{}\n",
             report.n, report.window, options.beta,
             options.with_instance ? "on" : "off", report.marker_patch,
             report.marker_position, report.first_instance_position,
             ok ? "pass" : "fail");
  return ok ? kExitOk : kExitVerification;
}

}  // namespace vxcode
