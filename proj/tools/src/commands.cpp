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

#include "vshadow_cli/commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "vshadow/align/kernels.hpp"
#include "vshadow/data/feature_io.hpp"
#include "vshadow/data/manifest.hpp"
#include "vshadow/data/synthetic.hpp"
#include "vshadow/eval/mos.hpp"
#include "vshadow/eval/report.hpp"
#include "vshadow/eval/transcripts.hpp"
#include "vshadow/features/audio.hpp"
#include "vshadow/s2s/checkpoint.hpp"
#include "vshadow/s2s/phases.hpp"
#include "vshadow/synth/ppg_to_spec.hpp"
#include "vshadow/synth/vocoder.hpp"

namespace vshadow::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr data::FeatureKind kExtractableKinds[] = {
    data::FeatureKind::kMel, data::FeatureKind::kPpgBnf,
    data::FeatureKind::kS3r};

fs::path FeaturePath(const PipelineConfig& config, data::FeatureKind kind,
                     data::Role role, const std::string& utterance_id) {
  return fs::path(config.paths.feature_dir) / data::FeatureKindName(kind) /
         data::RoleName(role) / (utterance_id + ".vshd");
}

fs::path CheckpointPath(const PipelineConfig& config,
                        const std::string& phase_name) {
  return fs::path(config.paths.checkpoint_dir) / (phase_name + ".vsck");
}

data::Manifest LoadManifestOrExplain(const PipelineConfig& config) {
  if (!fs::exists(config.paths.manifest)) {
    throw Error("manifest not found: " + config.paths.manifest +
                " (run gen-synthetic or point paths.manifest at a corpus)");
  }
  return data::LoadManifest(config.paths.manifest);
}

// Relative audio paths in a manifest resolve against the manifest's own
// directory, keeping a corpus movable as one tree.
fs::path AudioPath(const PipelineConfig& config, const std::string& path) {
  const fs::path audio(path);
  if (audio.is_absolute()) return audio;
  return fs::path(config.paths.manifest).parent_path() / audio;
}

data::FeatureSequence LoadFeatureOrExplain(const fs::path& path,
                                           const std::string& utterance_id) {
  if (!fs::exists(path)) {
    throw Error("missing features for utterance '" + utterance_id + "': " +
                path.string() + " (run extract first)");
  }
  return data::ReadFeatureContainer(path);
}

std::unique_ptr<eval::TranscriptProvider> MakeTranscripts(
    const PipelineConfig& config) {
  const std::string& spec = config.eval.transcripts;
  if (spec == "oracle_manifest") {
    return std::make_unique<eval::OracleManifestProvider>();
  }
  if (spec == "mock") {
    if (config.eval.codebook.empty()) {
      throw Error("eval.transcripts 'mock' needs eval.codebook");
    }
    const data::FeatureSequence codebook =
        data::ReadFeatureContainer(config.eval.codebook);
    return std::make_unique<eval::MockAsrProvider>(
        codebook.data, codebook.Frames() - 1, config.synthetic.sample_rate_hz);
  }
  if (spec.rfind("external:", 0) == 0) {
    return std::make_unique<eval::ExternalAsrProvider>(spec.substr(9));
  }
  throw Error("unknown transcript backend '" + spec +
              "' (mock, oracle_manifest, external:<model>)");
}

std::unique_ptr<eval::MosPredictor> MakeMos(const PipelineConfig& config) {
  const std::string& spec = config.eval.mos;
  if (spec == "none") return nullptr;
  if (spec == "mock") return std::make_unique<eval::MockMosPredictor>();
  if (spec.rfind("external:", 0) == 0) {
    return std::make_unique<eval::ExternalMosPredictor>(spec.substr(9));
  }
  throw Error("unknown naturalness backend '" + spec +
              "' (mock, none, external:<model>)");
}

std::string FormatLoss(const s2s::LossBreakdown& losses) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(4);
  out << "total " << losses.total << "  recon " << losses.recon << "  align "
      << losses.forward_sum << "  dur " << losses.duration;
  return out.str();
}

}  // namespace

int CmdGenSynthetic(const PipelineConfig& config, const std::string& out_dir,
                    std::ostream& log) {
  const std::string target =
      out_dir.empty() ? config.paths.corpus_dir : out_dir;
  if (target.empty()) {
    throw Error("no corpus directory: set paths.corpus_dir or pass --out");
  }
  const data::SyntheticCorpus corpus =
      data::GenerateSyntheticCorpus(config.synthetic, target);
  log << "gen-synthetic: " << corpus.manifest.records.size()
      << " triplets (seed " << config.synthetic.seed << ", corruption "
      << config.synthetic.corruption_rate << ") -> " << corpus.root_dir
      << "\n";
  return 0;
}

int CmdExtract(const PipelineConfig& config, const ExtractOptions& options,
               std::ostream& log) {
  const data::Manifest manifest = LoadManifestOrExplain(config);

  std::vector<data::FeatureKind> kinds;
  if (options.kinds.empty()) {
    for (const data::FeatureKind kind : kExtractableKinds) {
      if (config.embedders.HasBackend(kind)) kinds.push_back(kind);
    }
  } else {
    for (const std::string& name : options.kinds) {
      kinds.push_back(data::FeatureKindFromName(name));
    }
  }
  if (kinds.empty()) throw Error("no feature kinds configured for extraction");

  std::vector<data::Role> roles;
  if (options.roles.empty()) {
    roles.assign(std::begin(data::kAllRoles), std::end(data::kAllRoles));
  } else {
    for (const std::string& name : options.roles) {
      roles.push_back(data::RoleFromName(name));
    }
  }

  // Every referenced recording must exist before the first write.
  for (const data::TripletRecord& record : manifest.records) {
    for (const data::Role role : roles) {
      const fs::path audio = AudioPath(config, record.role_paths.at(role));
      if (!fs::exists(audio)) {
        throw Error("missing audio for utterance '" + record.utterance_id +
                    "': " + audio.string());
      }
    }
  }

  for (const data::FeatureKind kind : kinds) {
    int wrote = 0;
    int skipped = 0;
    for (const data::Role role : roles) {
      for (const data::TripletRecord& record : manifest.records) {
        const fs::path in = AudioPath(config, record.role_paths.at(role));
        const fs::path out =
            FeaturePath(config, kind, role, record.utterance_id);
        if (!options.force && fs::exists(out) &&
            fs::last_write_time(out) >= fs::last_write_time(in)) {
          ++skipped;
          continue;
        }
        fs::create_directories(out.parent_path());
        const features::Waveform wav = features::ReadWav(in);
        data::WriteFeatureContainer(config.embedders.Embed(wav, kind), out);
        ++wrote;
      }
    }
    log << "extract " << data::FeatureKindName(kind) << ": wrote " << wrote
        << ", skipped " << skipped << "\n";
  }
  return 0;
}

int CmdTrain(const PipelineConfig& config, const std::string& phase_name,
             std::ostream& log) {
  s2s::PhaseConfig phase = config.FindPhase(phase_name);
  phase.Validate();

  // Everything the run needs is checked before any training starts.
  s2s::Checkpoint init;
  const s2s::Checkpoint* init_ptr = nullptr;
  if (phase.RequiresInitCheckpoint()) {
    const fs::path init_path = CheckpointPath(config, phase.init_from);
    if (!fs::exists(init_path)) {
      throw Error("phase '" + phase.name + "' needs the checkpoint of '" +
                  phase.init_from + "'; run train --phase " + phase.init_from +
                  " first");
    }
    init = s2s::LoadCheckpoint(init_path.string());
    init_ptr = &init;
  }

  const data::Manifest manifest = LoadManifestOrExplain(config);
  const std::vector<const data::TripletRecord*> records =
      manifest.SplitRecords(data::Split::kTrain);
  if (records.empty()) throw Error("manifest has no train records");
  for (const data::TripletRecord* record : records) {
    for (const auto& [kind, role] :
         {std::pair(phase.source_feature, phase.source_role),
          std::pair(phase.target_feature, phase.target_role)}) {
      const fs::path path = FeaturePath(config, kind, role,
                                        record->utterance_id);
      if (!fs::exists(path)) {
        throw Error("missing features for utterance '" +
                    record->utterance_id + "': " + path.string() +
                    " (run extract first)");
      }
    }
  }

  std::vector<s2s::TrainPair> pairs;
  pairs.reserve(records.size());
  for (const data::TripletRecord* record : records) {
    s2s::TrainPair pair;
    pair.source =
        LoadFeatureOrExplain(FeaturePath(config, phase.source_feature,
                                         phase.source_role,
                                         record->utterance_id),
                             record->utterance_id)
            .data.cast<double>();
    pair.target =
        LoadFeatureOrExplain(FeaturePath(config, phase.target_feature,
                                         phase.target_role,
                                         record->utterance_id),
                             record->utterance_id)
            .data.cast<double>();
    pairs.push_back(std::move(pair));
  }

  s2s::ModelConfig model_config = config.model;
  model_config.source_dim = static_cast<int>(pairs.front().source.cols());
  model_config.target_dim = static_cast<int>(pairs.front().target.cols());
  model_config.Validate();

  s2s::TrainConfig train = config.train;
  train.seed = DeriveSeed(config.seed, "train:" + phase.name);

  log << "train " << phase.name << ": " << pairs.size() << " pairs, "
      << train.steps << " steps, seed " << train.seed << "\n";
  const s2s::PhaseResult result =
      s2s::RunPhase(phase, model_config, train, pairs, init_ptr);

  const int stride = std::max(1, train.steps / 10);
  for (const s2s::TrainLogRow& row : result.log) {
    if (row.step % stride == 0 || row.step == train.steps) {
      log << "  step " << row.step << "/" << train.steps << "  "
          << FormatLoss(row.losses) << "\n";
    }
  }

  fs::create_directories(config.paths.checkpoint_dir);
  const fs::path ckpt_path = CheckpointPath(config, phase.name);
  s2s::SaveCheckpoint(result.checkpoint, ckpt_path.string());

  const fs::path log_path =
      fs::path(config.paths.checkpoint_dir) / (phase.name + ".log.jsonl");
  std::ofstream log_file(log_path);
  if (!log_file) throw Error("cannot write train log: " + log_path.string());
  log_file << json{{"phase", phase.name},
                   {"seed", train.seed},
                   {"steps", train.steps},
                   {"pairs", pairs.size()}}
                  .dump()
           << '\n';
  for (const s2s::TrainLogRow& row : result.log) {
    log_file << json{{"step", row.step},
                     {"recon", row.losses.recon},
                     {"forward_sum", row.losses.forward_sum},
                     {"duration", row.losses.duration},
                     {"total", row.losses.total}}
                    .dump()
             << '\n';
  }
  log << "train " << phase.name << ": checkpoint -> " << ckpt_path.string()
      << "\n";
  return 0;
}

int CmdConvert(const PipelineConfig& config, const ConvertOptions& options,
               std::ostream& log) {
  if (options.phase.empty()) throw Error("convert needs --phase");
  const s2s::PhaseConfig& phase = config.FindPhase(options.phase);
  const std::string label =
      options.label.empty() ? options.phase : options.label;
  const data::Split split = data::SplitFromName(options.split);

  // The whole chain is validated before the first utterance is touched.
  const fs::path ckpt_path = CheckpointPath(config, options.phase);
  if (!fs::exists(ckpt_path)) {
    throw Error("no checkpoint for phase '" + options.phase +
                "'; run train --phase " + options.phase + " first");
  }
  synth::PpgToSpecDecoder ppg_to_spec;
  if (phase.target_feature == data::FeatureKind::kPpgBnf) {
    if (config.synthesis.ppg_to_spec.empty()) {
      throw Error(
          "converting a ppg_bnf target needs synthesis.ppg_to_spec; "
          "none is configured");
    }
    ppg_to_spec = synth::LoadPpgToSpec(config.synthesis.ppg_to_spec,
                                       DeriveSeed(config.seed, "ppg_to_spec"));
  }
  std::unique_ptr<synth::Vocoder> vocoder;
  if (config.synthesis.vocoder != "none") {
    synth::GriffinLimConfig gl;
    gl.sample_rate_hz = config.synthetic.sample_rate_hz;
    vocoder = synth::MakeVocoder(config.synthesis.vocoder, gl);
  }

  const data::Manifest manifest = LoadManifestOrExplain(config);
  const std::vector<const data::TripletRecord*> records =
      manifest.SplitRecords(split);
  if (records.empty()) {
    throw Error("manifest has no " + data::SplitName(split) + " records");
  }
  for (const data::TripletRecord* record : records) {
    const fs::path path = FeaturePath(config, phase.source_feature,
                                      phase.source_role, record->utterance_id);
    if (!fs::exists(path)) {
      throw Error("missing features for utterance '" + record->utterance_id +
                  "': " + path.string() + " (run extract first)");
    }
  }

  const s2s::Checkpoint ckpt = s2s::LoadCheckpoint(ckpt_path.string());
  s2s::Model model =
      s2s::RestoreModel(ckpt, DeriveSeed(config.seed, "convert"));

  const fs::path out_dir = fs::path(config.paths.output_dir) / label;
  fs::create_directories(out_dir);
  int wavs = 0;
  for (const data::TripletRecord* record : records) {
    const data::FeatureSequence source = data::ReadFeatureContainer(
        FeaturePath(config, phase.source_feature, phase.source_role,
                    record->utterance_id));
    data::FeatureSequence converted =
        model.Convert(source, phase.target_feature);
    data::WriteFeatureContainer(
        converted, out_dir / (record->utterance_id + ".vshd"));
    if (vocoder != nullptr) {
      const data::FeatureSequence mel =
          phase.target_feature == data::FeatureKind::kPpgBnf
              ? ppg_to_spec.Decode(converted)
              : converted;
      const features::Waveform wav = vocoder->Vocode(mel);
      features::WriteWav(wav, out_dir / (record->utterance_id + ".wav"));
      ++wavs;
    }
  }
  log << "convert " << label << ": " << records.size() << " utterances ("
      << wavs << " rendered) -> " << out_dir.string() << "\n";
  return 0;
}

int CmdEval(const PipelineConfig& config, const EvalOptions& options,
            std::ostream& log) {
  if (options.label.empty()) throw Error("eval needs --label");
  const data::Split split = options.split.empty()
                                ? config.eval.split
                                : data::SplitFromName(options.split);

  const std::unique_ptr<eval::TranscriptProvider> transcripts =
      MakeTranscripts(config);
  const std::unique_ptr<eval::MosPredictor> mos = MakeMos(config);
  const data::Manifest manifest = LoadManifestOrExplain(config);

  const fs::path out_dir = fs::path(config.paths.output_dir) / options.label;
  eval::SystemOutputs outputs;
  outputs.label = options.label;
  for (const data::TripletRecord* record : manifest.SplitRecords(split)) {
    const fs::path features = out_dir / (record->utterance_id + ".vshd");
    if (fs::exists(features)) {
      outputs.features[record->utterance_id] =
          data::ReadFeatureContainer(features);
    }
    const fs::path audio = out_dir / (record->utterance_id + ".wav");
    if (fs::exists(audio)) {
      outputs.audio[record->utterance_id] = features::ReadWav(audio);
    }
  }

  // References are compared in the same feature space as the outputs.
  const data::FeatureKind reference_kind =
      outputs.features.empty() ? data::FeatureKind::kMel
                               : outputs.features.begin()->second.kind;
  const eval::ReferenceFeatureLoader reference_features =
      [&config, reference_kind](const data::TripletRecord& record) {
        return LoadFeatureOrExplain(
            FeaturePath(config, reference_kind, data::Role::kL1S1,
                        record.utterance_id),
            record.utterance_id);
      };

  eval::EvalSettings settings;
  settings.split = split;
  settings.bertscore_dim = config.eval.bertscore_dim;
  settings.bertscore_seed = config.eval.bertscore_seed;

  eval::EvalReport report =
      eval::EvaluateSystem(outputs, manifest, *transcripts, mos.get(),
                           reference_features, nullptr, settings);
  report.seed = config.seed;

  fs::create_directories(config.paths.report_dir);
  const fs::path table_path =
      fs::path(config.paths.report_dir) / (options.label + ".txt");
  const fs::path records_path =
      fs::path(config.paths.report_dir) / (options.label + ".jsonl");
  std::ofstream(table_path) << report.Table();
  std::ofstream(records_path) << report.RecordsJsonl();

  log << report.Table();
  for (const std::string& warning : report.warnings) {
    log << "warning: " << warning << "\n";
  }
  log << "eval " << options.label << ": " << report.rows.size()
      << " utterances scored -> " << table_path.string() << "\n";
  return report.warnings.empty() ? 0 : 1;
}

int CmdAlign(const PipelineConfig& config, const AlignOptions& options,
             std::ostream& log) {
  if (options.a.empty() || options.b.empty()) {
    throw Error("align needs --a and --b feature files");
  }
  const align::FrameMetric metric =
      align::FrameMetricFromName(options.metric);
  const data::FeatureSequence a = data::ReadFeatureContainer(options.a);
  const data::FeatureSequence b = data::ReadFeatureContainer(options.b);

  double threshold = 0.0;
  if (options.threshold.has_value()) {
    threshold = *options.threshold;
  } else {
    if (options.calibrate_dir.empty()) {
      throw Error("align needs --threshold or --calibrate-dir");
    }
    const data::Manifest manifest = LoadManifestOrExplain(config);
    const std::vector<const data::TripletRecord*> dev =
        manifest.SplitRecords(data::Split::kDev);
    if (dev.empty()) {
      throw Error("manifest has no dev records to calibrate a threshold on");
    }
    std::vector<Eigen::VectorXd> pooled;
    for (const data::TripletRecord* record : dev) {
      const fs::path s1 = fs::path(options.calibrate_dir) /
                          data::RoleName(data::Role::kL1S1) /
                          (record->utterance_id + ".vshd");
      const fs::path ss = fs::path(options.calibrate_dir) /
                          data::RoleName(data::Role::kL1SS) /
                          (record->utterance_id + ".vshd");
      const align::DisfluencyProfile dev_profile =
          align::ComputeDisfluencyProfile(
              LoadFeatureOrExplain(s1, record->utterance_id),
              LoadFeatureOrExplain(ss, record->utterance_id), metric,
              std::numeric_limits<double>::infinity());
      pooled.push_back(dev_profile.per_step_distance);
    }
    threshold = align::CalibrateThreshold(pooled);
  }

  const align::DisfluencyProfile profile =
      align::ComputeDisfluencyProfile(a, b, metric, threshold);

  json steps = json::array();
  int flagged = 0;
  for (std::size_t s = 0; s < profile.path.steps.size(); ++s) {
    const bool flag = profile.segment_flags[s];
    flagged += flag ? 1 : 0;
    steps.push_back(json{{"i", profile.path.steps[s].first},
                         {"j", profile.path.steps[s].second},
                         {"distance", profile.per_step_distance[s]},
                         {"flagged", flag}});
  }
  const json out_json{{"a", options.a},
                      {"b", options.b},
                      {"metric", align::FrameMetricName(metric)},
                      {"threshold", profile.threshold},
                      {"total_score", profile.path.total_score},
                      {"seed", config.seed},
                      {"flagged_steps", flagged},
                      {"steps", steps}};

  fs::path out_path(options.out);
  if (out_path.empty()) {
    out_path = fs::path(config.paths.report_dir) /
               ("align_" + fs::path(options.a).stem().string() + "_" +
                fs::path(options.b).stem().string() + ".json");
  }
  fs::create_directories(out_path.parent_path());
  std::ofstream out(out_path);
  if (!out) throw Error("cannot write profile: " + out_path.string());
  out << out_json.dump(2) << '\n';

  log << "align: " << profile.path.steps.size() << " steps, " << flagged
      << " flagged (threshold " << profile.threshold << ") -> "
      << out_path.string() << "\n";
  return 0;
}

}  // namespace vshadow::cli
