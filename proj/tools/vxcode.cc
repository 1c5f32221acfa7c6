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

// vxcode: explain, evaluate, oracle, bias-bench. See README.md.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "vxcode/commands.h"
#include "vxcode/config.h"

namespace {

int WithConfig(const std::string& path,
               const std::function<int(const vxcode::RunConfig&)>& run) {
  vxcode::RunConfig config;
  try {
    config = vxcode::LoadRunConfig(path);
  } catch (const vxcode::ConfigError& e) {
    std::cerr << "error[config]: " << e.what() << "\n";
    return vxcode::kExitUsage;
  }
  return run(config);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Black-box object-detector explanations by greedy patch "
      "insertion and deletion"};
  app.require_subcommand(1);

  std::string config_path;
  std::string input_path;

  auto* explain = app.add_subcommand("explain", "Explain one detection");
  explain->add_option("--config", config_path, "Run config file")->required();

  auto* evaluate =
      app.add_subcommand("evaluate", "Faithfulness and localization metrics");
  evaluate->add_option("--config", config_path, "Run config file")->required();
  evaluate->add_option("--input", input_path, "Trace file or heat-map CSV")
      ->required();

  int n = 6;
  int trials = 100;
  std::uint64_t seed = 0;
  bool corrupt = false;
  auto* oracle = app.add_subcommand("oracle", "Check decomposition identities");
  oracle->add_option("--n", n, "Players per game")->required();
  oracle->add_option("--trials", trials, "Random games")->required();
  oracle->add_option("--seed", seed, "PRNG seed")->required();
  oracle->add_flag("--corrupt-identity", corrupt)->group("");

  vxcode::BiasBenchOptions bias;
  bool no_instance = false;
  std::string bias_out;
  auto* bench = app.add_subcommand("bias-bench", "Marker-biased scenario");
  bench->add_option("--seed", bias.seed, "PRNG seed")->required();
  bench->add_option("--beta", bias.beta, "Marker gain")->default_val(0.5);
  bench->add_flag("--no-instance", no_instance, "Zero all instance weights");
  bench->add_option("--out", bias_out, "Directory for trace and heat map");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : vxcode::kExitUsage;
  }

  if (*explain) {
    return WithConfig(config_path, [](const vxcode::RunConfig& c) {
      return vxcode::CmdExplain(c, std::cout, std::cerr);
    });
  }
  if (*evaluate) {
    return WithConfig(config_path, [&](const vxcode::RunConfig& c) {
      return vxcode::CmdEvaluate(c, input_path, std::cout, std::cerr);
    });
  }
  if (*oracle) {
    return vxcode::CmdOracle(n, trials, seed, corrupt, std::cout, std::cerr);
  }
  bias.with_instance = !no_instance;
  if (!bias_out.empty()) bias.output_dir = bias_out;
  return vxcode::CmdBiasBench(bias, std::cout, std::cerr);
}
