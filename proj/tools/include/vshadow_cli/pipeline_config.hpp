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
// One JSON file drives the whole pipeline: corpus locations, embedder
// backends, model and training settings, the ordered phase list, the
// synthesis chain and the evaluation adapters. Relative paths resolve
// against the working directory.

#ifndef VSHADOW_CLI_PIPELINE_CONFIG_HPP_
#define VSHADOW_CLI_PIPELINE_CONFIG_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "vshadow/data/manifest.hpp"
#include "vshadow/data/synthetic.hpp"
#include "vshadow/features/embedder.hpp"
#include "vshadow/s2s/model.hpp"
#include "vshadow/s2s/phases.hpp"

namespace vshadow::cli {

struct PipelinePaths {
  std::string manifest;
  std::string corpus_dir;      // synthetic corpus root (wavs, latents, truth)
  std::string feature_dir;
  std::string checkpoint_dir;
  std::string output_dir;
  std::string report_dir;
};

struct SynthesisConfig {
  std::string vocoder = "fallback";  // "none" disables audio rendering
  std::string ppg_to_spec;           // decoder file; empty = no posterior chain
};

struct EvalToolConfig {
  // "mock" | "oracle_manifest" | "external:<model>"
  std::string transcripts = "mock";
  // "mock" | "none" | "external:<model>"
  std::string mos = "mock";
  std::string codebook;  // feature container feeding the mock recognizer
  data::Split split = data::Split::kTest;
  int bertscore_dim = 64;
  std::uint64_t bertscore_seed = 777;
};

struct PipelineConfig {
  std::uint64_t seed = 42;
  PipelinePaths paths;
  features::EmbedderRegistry embedders;
  // Feature dims stay 0 here; training fills them from the extracted data.
  s2s::ModelConfig model;
  s2s::TrainConfig train;
  // init_from names an earlier entry of this list, not a file.
  std::vector<s2s::PhaseConfig> phases;
  SynthesisConfig synthesis;
  EvalToolConfig eval;
  data::SyntheticConfig synthetic;  // seed is always the root seed

  /// Phase names unique, per-phase rules hold, and every init_from names
  /// an earlier phase. Throws Error.
  void Validate() const;

  const s2s::PhaseConfig& FindPhase(const std::string& name) const;
};

PipelineConfig PipelineConfigFromJsonText(const std::string& text);
PipelineConfig LoadPipelineConfig(const std::string& path);

/// Stable sub-seed for one named stage of a run; every piece of pipeline
/// randomness derives from the root seed through this.
std::uint64_t DeriveSeed(std::uint64_t root_seed, const std::string& stage);

}  // namespace vshadow::cli

#endif  // VSHADOW_CLI_PIPELINE_CONFIG_HPP_
