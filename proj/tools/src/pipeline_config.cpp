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

#include "vshadow_cli/pipeline_config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace vshadow::cli {
namespace {

using nlohmann::json;

std::string GetString(const json& j, const char* key,
                      const std::string& fallback) {
  return j.contains(key) ? j.at(key).get<std::string>() : fallback;
}

void ParsePaths(const json& j, PipelinePaths* paths) {
  paths->manifest = GetString(j, "manifest", paths->manifest);
  paths->corpus_dir = GetString(j, "corpus_dir", paths->corpus_dir);
  paths->feature_dir = GetString(j, "feature_dir", paths->feature_dir);
  paths->checkpoint_dir = GetString(j, "checkpoint_dir", paths->checkpoint_dir);
  paths->output_dir = GetString(j, "output_dir", paths->output_dir);
  paths->report_dir = GetString(j, "report_dir", paths->report_dir);
}

void ParseModel(const json& j, s2s::ModelConfig* model) {
  model->hidden_dim = j.value("hidden_dim", model->hidden_dim);
  model->num_encoder_blocks =
      j.value("num_encoder_blocks", model->num_encoder_blocks);
  model->num_decoder_blocks =
      j.value("num_decoder_blocks", model->num_decoder_blocks);
  model->attention_heads = j.value("attention_heads", model->attention_heads);
  model->dropout = j.value("dropout", model->dropout);
  model->alignment_dim = j.value("alignment_dim", model->alignment_dim);
  if (j.contains("loss_weights")) {
    const json& w = j.at("loss_weights");
    model->loss_weights.recon = w.value("recon", model->loss_weights.recon);
    model->loss_weights.forward_sum =
        w.value("forward_sum", model->loss_weights.forward_sum);
    model->loss_weights.duration =
        w.value("duration", model->loss_weights.duration);
  }
}

void ParseTrain(const json& j, s2s::TrainConfig* train) {
  train->steps = j.value("steps", train->steps);
  train->batch_size = j.value("batch_size", train->batch_size);
  train->lr = j.value("lr", train->lr);
}

s2s::PhaseConfig ParsePhase(const json& j) {
  s2s::PhaseConfig phase;
  phase.phase = s2s::PhaseFromName(j.at("phase").get<std::string>());
  phase.name = GetString(j, "name", s2s::PhaseName(phase.phase));
  phase.source_role =
      data::RoleFromName(GetString(j, "source_role", "L2_R"));
  phase.source_feature =
      data::FeatureKindFromName(GetString(j, "source_feature", "mel"));
  phase.target_role =
      data::RoleFromName(GetString(j, "target_role", "L1_SS"));
  phase.target_feature =
      data::FeatureKindFromName(GetString(j, "target_feature", "mel"));
  if (j.contains("frozen_groups")) {
    for (const json& g : j.at("frozen_groups")) {
      phase.frozen_groups.insert(g.get<std::string>());
    }
  }
  phase.freeze_duration_predictor =
      j.value("freeze_duration_predictor", phase.freeze_duration_predictor);
  phase.init_from = GetString(j, "init_from", "");
  return phase;
}

void ParseSynthesis(const json& j, SynthesisConfig* synthesis) {
  synthesis->vocoder = GetString(j, "vocoder", synthesis->vocoder);
  synthesis->ppg_to_spec = GetString(j, "ppg_to_spec", synthesis->ppg_to_spec);
}

void ParseEval(const json& j, EvalToolConfig* eval) {
  eval->transcripts = GetString(j, "transcripts", eval->transcripts);
  eval->mos = GetString(j, "mos", eval->mos);
  eval->codebook = GetString(j, "codebook", eval->codebook);
  if (j.contains("split")) {
    eval->split = data::SplitFromName(j.at("split").get<std::string>());
  }
  eval->bertscore_dim = j.value("bertscore_dim", eval->bertscore_dim);
  eval->bertscore_seed = j.value("bertscore_seed", eval->bertscore_seed);
}

void ParseSynthetic(const json& j, data::SyntheticConfig* synthetic) {
  synthetic->num_triplets = j.value("num_triplets", synthetic->num_triplets);
  synthetic->corruption_rate =
      j.value("corruption_rate", synthetic->corruption_rate);
  synthetic->latent_dim = j.value("latent_dim", synthetic->latent_dim);
  synthetic->vocab_size = j.value("vocab_size", synthetic->vocab_size);
  synthetic->min_segments = j.value("min_segments", synthetic->min_segments);
  synthetic->max_segments = j.value("max_segments", synthetic->max_segments);
  synthetic->min_segment_frames =
      j.value("min_segment_frames", synthetic->min_segment_frames);
  synthetic->max_segment_frames =
      j.value("max_segment_frames", synthetic->max_segment_frames);
  synthetic->breakdown_noise =
      j.value("breakdown_noise", synthetic->breakdown_noise);
  synthetic->sample_rate_hz =
      j.value("sample_rate_hz", synthetic->sample_rate_hz);
}

}  // namespace

void PipelineConfig::Validate() const {
  if (paths.manifest.empty()) throw Error("paths.manifest must be set");
  std::set<std::string> seen;
  for (std::size_t i = 0; i < phases.size(); ++i) {
    const s2s::PhaseConfig& phase = phases[i];
    if (phase.name.empty()) throw Error("phase entries need a name");
    if (!seen.insert(phase.name).second) {
      throw Error("duplicate phase name '" + phase.name + "'");
    }
    phase.Validate();
    if (phase.RequiresInitCheckpoint()) {
      if (phase.init_from.empty()) {
        throw Error("phase '" + phase.name +
                    "' needs init_from naming its stage-1 phase");
      }
      bool earlier = false;
      for (std::size_t k = 0; k < i; ++k) {
        if (phases[k].name == phase.init_from) earlier = true;
      }
      if (!earlier) {
        throw Error("phase '" + phase.name + "' init_from '" +
                    phase.init_from + "' must name an earlier phase");
      }
    }
  }
  synthetic.Validate();
}

const s2s::PhaseConfig& PipelineConfig::FindPhase(
    const std::string& name) const {
  for (const s2s::PhaseConfig& phase : phases) {
    if (phase.name == name) return phase;
  }
  std::string known;
  for (const s2s::PhaseConfig& phase : phases) {
    if (!known.empty()) known += ", ";
    known += phase.name;
  }
  throw Error("unknown phase '" + name + "' (configured: " + known + ")");
}

PipelineConfig PipelineConfigFromJsonText(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed pipeline config: ") + e.what());
  }
  PipelineConfig config;
  try {
    config.seed = j.value("seed", config.seed);
    if (j.contains("paths")) ParsePaths(j.at("paths"), &config.paths);
    if (j.contains("embedders")) {
      config.embedders =
          features::EmbedderRegistry::FromJsonText(j.at("embedders").dump());
    } else {
      config.embedders = features::EmbedderRegistry::Default();
    }
    if (j.contains("model")) ParseModel(j.at("model"), &config.model);
    if (j.contains("train")) ParseTrain(j.at("train"), &config.train);
    if (j.contains("phases")) {
      for (const json& p : j.at("phases")) {
        config.phases.push_back(ParsePhase(p));
      }
    }
    if (j.contains("synthesis")) {
      ParseSynthesis(j.at("synthesis"), &config.synthesis);
    }
    if (j.contains("eval")) ParseEval(j.at("eval"), &config.eval);
    if (j.contains("synthetic")) {
      ParseSynthetic(j.at("synthetic"), &config.synthetic);
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad pipeline config field: ") + e.what());
  }
  config.synthetic.seed = config.seed;
  config.train.seed = config.seed;
  config.Validate();
  return config;
}

PipelineConfig LoadPipelineConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open pipeline config: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return PipelineConfigFromJsonText(buffer.str());
}

std::uint64_t DeriveSeed(std::uint64_t root_seed, const std::string& stage) {
  const std::uint64_t state = Fnv1a64(&root_seed, sizeof(root_seed));
  return Fnv1a64Extend(state, stage.data(), stage.size());
}

}  // namespace vshadow::cli
