// Copyright (c) 2026 vshadow authors. All rights reserved.
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
// vshadow: virtual shadowing pipeline driver.
// Exit codes: 0 ok, 1 domain error, 2 usage error.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "vshadow_cli/commands.hpp"
#include "vshadow_cli/pipeline_config.hpp"

namespace {

struct GlobalOptions {
  std::string config_path = "configs/desk.json";
  std::optional<std::uint64_t> seed;
  std::optional<std::string> manifest;
};

vshadow::cli::PipelineConfig LoadConfig(const GlobalOptions& global) {
  vshadow::cli::PipelineConfig config =
      vshadow::cli::LoadPipelineConfig(global.config_path);
  if (global.seed.has_value()) {
    config.seed = *global.seed;
    config.synthetic.seed = *global.seed;
    config.train.seed = *global.seed;
  }
  if (global.manifest.has_value()) config.paths.manifest = *global.manifest;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"virtual shadowing pipeline: extraction, phase training, "
               "conversion, synthesis, alignment, evaluation"};
  app.require_subcommand(1);

  GlobalOptions global;
  app.add_option("--config", global.config_path,
                 "pipeline config file (JSON)")
      ->capture_default_str();
  app.add_option("--seed", global.seed, "override the root seed");
  app.add_option("--manifest", global.manifest,
                 "override the manifest path");

  CLI::App* gen = app.add_subcommand("gen-synthetic",
                                     "write the synthetic shadowing corpus");
  std::string gen_out;
  gen->add_option("--out", gen_out, "corpus directory (default from config)");

  CLI::App* extract =
      app.add_subcommand("extract", "extract feature containers per "
                                    "(utterance, role, kind)");
  vshadow::cli::ExtractOptions extract_options;
  extract->add_option("--kind", extract_options.kinds,
                      "feature kinds (default: all configured)");
  extract->add_option("--role", extract_options.roles,
                      "roles (default: L2_R, L1_S1, L1_SS)");
  extract->add_flag("--force", extract_options.force,
                    "rewrite outputs even when up to date");

  CLI::App* train = app.add_subcommand("train", "train one configured phase");
  std::string train_phase;
  train->add_option("--phase", train_phase, "phase name from the config")
      ->required();

  CLI::App* convert =
      app.add_subcommand("convert", "run a checkpoint over a split");
  vshadow::cli::ConvertOptions convert_options;
  convert->add_option("--phase", convert_options.phase,
                      "phase whose checkpoint to run")
      ->required();
  convert->add_option("--split", convert_options.split, "manifest split")
      ->capture_default_str();
  convert->add_option("--label", convert_options.label,
                      "output label (default: phase name)");

  CLI::App* eval = app.add_subcommand("eval", "score one system's outputs");
  vshadow::cli::EvalOptions eval_options;
  eval->add_option("--label", eval_options.label, "converted-output label")
      ->required();
  eval->add_option("--split", eval_options.split,
                   "manifest split (default from config)");

  CLI::App* align = app.add_subcommand(
      "align", "warping profile between two feature files");
  vshadow::cli::AlignOptions align_options;
  align->add_option("--a", align_options.a, "feature container (profiled)")
      ->required();
  align->add_option("--b", align_options.b, "feature container (reference)")
      ->required();
  align->add_option("--metric", align_options.metric, "cosine or euclidean")
      ->capture_default_str();
  align->add_option("--threshold", align_options.threshold,
                    "flag distances above this");
  align->add_option("--calibrate-dir", align_options.calibrate_dir,
                    "role-layout feature dir for dev-split calibration");
  align->add_option("--out", align_options.out, "profile output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    const vshadow::cli::PipelineConfig config = LoadConfig(global);
    if (gen->parsed()) {
      return vshadow::cli::CmdGenSynthetic(config, gen_out, std::cout);
    }
    if (extract->parsed()) {
      return vshadow::cli::CmdExtract(config, extract_options, std::cout);
    }
    if (train->parsed()) {
      return vshadow::cli::CmdTrain(config, train_phase, std::cout);
    }
    if (convert->parsed()) {
      return vshadow::cli::CmdConvert(config, convert_options, std::cout);
    }
    if (eval->parsed()) {
      return vshadow::cli::CmdEval(config, eval_options, std::cout);
    }
    if (align->parsed()) {
      return vshadow::cli::CmdAlign(config, align_options, std::cout);
    }
    std::cerr << "error: no command\n";
    return 2;
  } catch (const vshadow::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
