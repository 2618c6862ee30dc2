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
// Pipeline verbs. Each command validates its whole configuration before
// touching the filesystem, returns a process exit code, and throws Error
// for domain failures (the binary maps those to exit code 1).

#ifndef VSHADOW_CLI_COMMANDS_HPP_
#define VSHADOW_CLI_COMMANDS_HPP_

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "vshadow_cli/pipeline_config.hpp"

namespace vshadow::cli {

struct ExtractOptions {
  std::vector<std::string> kinds;  // default: every kind with a backend
  std::vector<std::string> roles;  // default: all three roles
  bool force = false;              // rewrite even when outputs are current
};

struct ConvertOptions {
  std::string phase;  // phase whose checkpoint and feature kinds to use
  std::string split = "test";
  std::string label;  // output directory name; defaults to the phase name
};

struct EvalOptions {
  std::string label;  // converted-output directory under output_dir
  std::string split;  // empty = the configured evaluation split
};

struct AlignOptions {
  std::string a;  // feature container, the utterance being profiled
  std::string b;  // feature container, the fluent reference
  std::string metric = "cosine";
  std::optional<double> threshold;
  // Role-layout directory (<dir>/L1_S1/<id>.vshd) used to calibrate the
  // default threshold over the dev split when none is given.
  std::string calibrate_dir;
  std::string out;  // profile path; defaults into report_dir
};

/// Writes the synthetic corpus (audio, latents, truth, manifest) from the
/// configured settings and root seed.
int CmdGenSynthetic(const PipelineConfig& config, const std::string& out_dir,
                    std::ostream& log);

/// One feature container per (utterance, role, kind). Skips outputs newer
/// than their audio unless forced.
int CmdExtract(const PipelineConfig& config, const ExtractOptions& options,
               std::ostream& log);

/// Trains one configured phase on the train split; writes the checkpoint
/// and a per-step loss log.
int CmdTrain(const PipelineConfig& config, const std::string& phase_name,
             std::ostream& log);

/// Runs a trained checkpoint over a split: converted features per
/// utterance, plus waveforms when a synthesis chain is configured.
int CmdConvert(const PipelineConfig& config, const ConvertOptions& options,
               std::ostream& log);

/// Scores one system's outputs; writes the report table and records.
/// Returns 1 when any utterance of the split could not be scored.
int CmdEval(const PipelineConfig& config, const EvalOptions& options,
            std::ostream& log);

/// Warping profile between two feature files: path steps, per-step
/// distances and over-threshold flags, serialized as JSON.
int CmdAlign(const PipelineConfig& config, const AlignOptions& options,
             std::ostream& log);

}  // namespace vshadow::cli

#endif  // VSHADOW_CLI_COMMANDS_HPP_
