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
// Release gate. Nine checks, one pass/fail line each, exit 0 only when all
// pass. Every tolerance is pinned here. The pipeline-level checks drive the
// real command layer over the synthetic corpus with all external adapters
// mocked.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "oracles.hpp"
#include "vshadow/align/kernels.hpp"
#include "vshadow/common.hpp"
#include "vshadow/data/feature_io.hpp"
#include "vshadow/data/manifest.hpp"
#include "vshadow/data/synthetic.hpp"
#include "vshadow/eval/metrics.hpp"
#include "vshadow/eval/report.hpp"
#include "vshadow/eval/transcripts.hpp"
#include "vshadow/features/embedder.hpp"
#include "vshadow/s2s/checkpoint.hpp"
#include "vshadow/s2s/model.hpp"
#include "vshadow/s2s/phases.hpp"
#include "vshadow_cli/commands.hpp"
#include "vshadow_cli/pipeline_config.hpp"

namespace vshadow {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Pinned tolerances and thresholds, one block for the whole gate.
constexpr int kKernelInstances = 100;          // per DP kernel
constexpr double kForwardSumTol = 1e-6;        // vs brute-force log-sum-exp
constexpr double kKernelBudgetSeconds = 60.0;  // DP-kernel check runtime
constexpr int kGradInstances = 20;             // forward-sum gradient checks
constexpr double kGradRelTol = 1e-3;           // vs central finite differences
constexpr double kGradAbsFloor = 1e-8;         // both sides numerically zero
constexpr int kEditMaxLen = 6;                 // full sweep bound
constexpr int kEditAlphabet = 3;
constexpr int kBertScorePairs = 50;
constexpr double kBertScoreTol = 1e-6;
constexpr double kLossHalfRatio = 0.5;      // smoothed final vs initial recon
constexpr int kLossSmoothWindow = 10;       // steps averaged at each end
constexpr double kDiagonalBand = 3.0;       // |i * T_tgt / T_src - j| bound
constexpr double kDiagonalMassFrac = 0.6;   // path mass required in band
constexpr double kRecallFloor = 0.7;        // corrupted segments recovered
constexpr double kPrecisionFloor = 0.5;     // flagged steps inside corruption
constexpr std::uint64_t kPipelineSeed = 7;  // root seed of the shared run
constexpr std::uint64_t kReplaySeed = 11;   // root seed of the replay runs

struct CriterionResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

std::string Seconds(std::chrono::steady_clock::time_point start) {
  const double s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(1);
  out << s << "s";
  return out.str();
}

// ---------------------------------------------------------------------------
// Shared pipeline workspace: synthetic corpus, extracted features, and a
// trained one-step system, built once through the command layer.

cli::PipelineConfig MakeConfig(const std::string& work_dir,
                               std::uint64_t seed, int num_triplets,
                               int train_steps) {
  cli::PipelineConfig config;
  config.seed = seed;
  config.paths.corpus_dir = work_dir + "/corpus";
  config.paths.manifest = work_dir + "/corpus/manifest.jsonl";
  config.paths.feature_dir = work_dir + "/features";
  config.paths.checkpoint_dir = work_dir + "/checkpoints";
  config.paths.output_dir = work_dir + "/outputs";
  config.paths.report_dir = work_dir + "/reports";
  config.embedders = features::EmbedderRegistry::FromJsonText(R"({
    "mel": {"backend": "mel"},
    "ppg_bnf": {"backend": "pseudo", "seed": 101},
    "s3r": {"backend": "pseudo", "seed": 202, "layer_index": 9}
  })");
  config.model.hidden_dim = 32;
  config.model.num_encoder_blocks = 1;
  config.model.num_decoder_blocks = 1;
  config.model.attention_heads = 2;
  config.model.dropout = 0.0;
  config.model.alignment_dim = 16;
  config.train.steps = train_steps;
  config.train.batch_size = 6;
  config.train.lr = 1e-3;

  s2s::PhaseConfig one_step;
  one_step.phase = s2s::Phase::kOneStep;
  one_step.name = "one_step";
  one_step.source_role = data::Role::kL2R;
  one_step.source_feature = data::FeatureKind::kS3r;
  one_step.target_role = data::Role::kL1SS;
  one_step.target_feature = data::FeatureKind::kMel;
  config.phases.push_back(one_step);

  // Same wiring, never trained; its checkpoint is a fresh snapshot.
  s2s::PhaseConfig untrained = one_step;
  untrained.name = "untrained";
  config.phases.push_back(untrained);

  config.synthesis.vocoder = "fallback";
  config.eval.transcripts = "mock";
  config.eval.mos = "mock";
  config.eval.codebook = config.paths.corpus_dir + "/codebook.vshd";
  config.eval.split = data::Split::kTest;
  config.synthetic.num_triplets = num_triplets;
  config.synthetic.corruption_rate = 0.3;
  config.synthetic.seed = seed;
  config.Validate();
  return config;
}

void RunPipelineOnce(const cli::PipelineConfig& config, std::ostream& log) {
  cli::CmdGenSynthetic(config, "", log);
  cli::ExtractOptions extract;
  extract.kinds = {"mel", "s3r"};
  cli::CmdExtract(config, extract, log);
  cli::CmdTrain(config, "one_step", log);

  // The untrained baseline: snapshot a freshly initialized model of the
  // same shape so convert/eval treat it like any other checkpoint.
  s2s::ModelConfig model_config = config.model;
  model_config.source_dim = 768;
  model_config.target_dim = 80;
  s2s::Model fresh(model_config, cli::DeriveSeed(config.seed, "untrained"));
  const s2s::Checkpoint snapshot = s2s::SnapshotModel(fresh, {});
  fs::create_directories(config.paths.checkpoint_dir);
  s2s::SaveCheckpoint(snapshot,
                      config.paths.checkpoint_dir + "/untrained.vsck");

  cli::ConvertOptions convert;
  convert.phase = "one_step";
  cli::CmdConvert(config, convert, log);
  convert.phase = "untrained";
  cli::CmdConvert(config, convert, log);

  cli::EvalOptions eval;
  eval.label = "one_step";
  cli::CmdEval(config, eval, log);
  eval.label = "untrained";
  cli::CmdEval(config, eval, log);
}

struct PipelineFixture {
  cli::PipelineConfig config;
  std::string error;  // nonempty when the shared run failed

  static const PipelineFixture& Get() {
    static PipelineFixture fixture = Build();
    return fixture;
  }

 private:
  static PipelineFixture Build() {
    PipelineFixture fixture;
    const std::string work =
        (fs::temp_directory_path() / "vshadow_acceptance" / "main").string();
    fs::remove_all(work);
    fs::create_directories(work);
    fixture.config = MakeConfig(work, kPipelineSeed, 50, 200);
    try {
      RunPipelineOnce(fixture.config, std::cout);
    } catch (const std::exception& e) {
      fixture.error = e.what();
    }
    return fixture;
  }
};

json ReadSummaryRecord(const std::string& records_path) {
  std::ifstream in(records_path);
  if (!in) throw Error("missing report records: " + records_path);
  std::string line;
  std::string last;
  while (std::getline(in, line)) {
    if (!line.empty()) last = line;
  }
  const json record = json::parse(last);
  if (record.at("type") != "summary") {
    throw Error("no summary record in " + records_path);
  }
  return record;
}

// ---------------------------------------------------------------------------
// 1/9: DP kernel scores match exhaustive enumeration.

CriterionResult CheckDpKernels() {
  CriterionResult result{"dp kernels equal exhaustive path enumeration"};
  const auto start = std::chrono::steady_clock::now();
  Rng rng(101);

  int dtw_ok = 0;
  for (int n = 0; n < kKernelInstances; ++n) {
    align::ScoreMatrix cost;
    cost.semantics = align::ScoreSemantics::kCost;
    cost.values = testsupport::DyadicMatrix(rng.UniformInt(1, 5),
                                            rng.UniformInt(1, 5), 0.0, 4.0,
                                            &rng);
    const align::AlignmentPath path = align::Dtw(cost);
    if (path.total_score == testsupport::EnumerateDtwCost(cost.values)) {
      ++dtw_ok;
    }
  }

  int mas_ok = 0;
  for (int n = 0; n < kKernelInstances; ++n) {
    const int src = rng.UniformInt(1, 4);
    align::ScoreMatrix loglik;
    loglik.semantics = align::ScoreSemantics::kLogLikelihood;
    loglik.values = testsupport::DyadicMatrix(src, rng.UniformInt(src, 6),
                                              -4.0, 0.0, &rng);
    const align::AlignmentPath path = align::Mas(loglik);
    if (path.total_score == testsupport::EnumerateMasScore(loglik.values)) {
      ++mas_ok;
    }
  }

  int fs_ok = 0;
  for (int n = 0; n < kKernelInstances; ++n) {
    const int src = rng.UniformInt(1, 4);
    const int tgt = rng.UniformInt(src, 6);
    align::ScoreMatrix loglik;
    loglik.semantics = align::ScoreSemantics::kLogLikelihood;
    loglik.values.resize(src, tgt);
    for (int i = 0; i < src; ++i) {
      for (int j = 0; j < tgt; ++j) loglik.values(i, j) = rng.Uniform(-4.0, 0.0);
    }
    const double loss = align::ForwardSum(loglik);
    const double oracle =
        -testsupport::EnumerateForwardSumLogTotal(loglik.values) / tgt;
    if (std::abs(loss - oracle) <= kForwardSumTol) ++fs_ok;
  }

  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  result.pass = dtw_ok == kKernelInstances && mas_ok == kKernelInstances &&
                fs_ok == kKernelInstances && elapsed < kKernelBudgetSeconds;
  std::ostringstream detail;
  detail << "dtw " << dtw_ok << "/" << kKernelInstances << ", mas " << mas_ok
         << "/" << kKernelInstances << ", forward_sum " << fs_ok << "/"
         << kKernelInstances << ", " << Seconds(start);
  result.detail = detail.str();
  return result;
}

// ---------------------------------------------------------------------------
// 2/9: forward-sum gradient vs central finite differences.

CriterionResult CheckForwardSumGradient() {
  CriterionResult result{"forward-sum gradient matches finite differences"};
  Rng rng(202);
  int ok = 0;
  double worst = 0.0;
  for (int n = 0; n < kGradInstances; ++n) {
    align::ScoreMatrix loglik;
    loglik.semantics = align::ScoreSemantics::kLogLikelihood;
    loglik.values.resize(3, 5);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 5; ++j) loglik.values(i, j) = rng.Uniform(-3.0, 0.0);
    }
    Eigen::MatrixXd grad;
    align::ForwardSumWithGrad(loglik, &grad);

    bool instance_ok = true;
    const double h = 1e-6;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 5; ++j) {
        align::ScoreMatrix shifted = loglik;
        shifted.values(i, j) += h;
        const double up = align::ForwardSum(shifted);
        shifted.values(i, j) = loglik.values(i, j) - h;
        const double down = align::ForwardSum(shifted);
        const double numeric = (up - down) / (2.0 * h);
        const double analytic = grad(i, j);
        if (std::abs(analytic - numeric) < kGradAbsFloor) continue;
        const double rel = std::abs(analytic - numeric) /
                           std::max({std::abs(analytic), std::abs(numeric),
                                     1e-6});
        worst = std::max(worst, rel);
        if (rel > kGradRelTol) instance_ok = false;
      }
    }
    if (instance_ok) ++ok;
  }
  result.pass = ok == kGradInstances;
  std::ostringstream detail;
  detail << ok << "/" << kGradInstances << " instances, worst rel err "
         << worst;
  result.detail = detail.str();
  return result;
}

// ---------------------------------------------------------------------------
// 3/9: metric oracles (edit counts and feature similarity).

void AllTokenLists(int max_len, std::vector<std::vector<std::string>>* out) {
  const std::vector<std::string> alphabet = {"a", "b", "c"};
  out->push_back({});
  std::size_t level_begin = 0;
  for (int len = 1; len <= max_len; ++len) {
    const std::size_t level_end = out->size();
    for (std::size_t k = level_begin; k < level_end; ++k) {
      for (const std::string& symbol : alphabet) {
        std::vector<std::string> next = (*out)[k];
        next.push_back(symbol);
        out->push_back(std::move(next));
      }
    }
    level_begin = level_end;
  }
}

CriterionResult CheckMetricOracles() {
  CriterionResult result{"metric oracles: edit counts and similarity"};
  const auto start = std::chrono::steady_clock::now();

  std::vector<std::vector<std::string>> lists;
  AllTokenLists(kEditMaxLen, &lists);
  long pairs = 0;
  long mismatches = 0;
  for (const std::vector<std::string>& hyp : lists) {
    for (const std::vector<std::string>& ref : lists) {
      const eval::EditCounts counts = eval::ComputeEditCounts(hyp, ref);
      const int oracle = testsupport::RecursiveEditDistance(hyp, ref);
      ++pairs;
      if (counts.TotalEdits() != oracle ||
          counts.ref_length != static_cast<int>(ref.size())) {
        ++mismatches;
      }
    }
  }

  Rng rng(303);
  int sbs_ok = 0;
  int self_ok = 0;
  for (int n = 0; n < kBertScorePairs; ++n) {
    const int dim = rng.UniformInt(4, 32);
    Eigen::MatrixXf gen(rng.UniformInt(1, 20), dim);
    Eigen::MatrixXf ref(rng.UniformInt(1, 20), dim);
    for (int i = 0; i < gen.rows(); ++i) {
      for (int j = 0; j < dim; ++j) {
        gen(i, j) = static_cast<float>(rng.Normal());
      }
    }
    for (int i = 0; i < ref.rows(); ++i) {
      for (int j = 0; j < dim; ++j) {
        ref(i, j) = static_cast<float>(rng.Normal());
      }
    }
    const double score = eval::SpeechBertScoreRows(gen, ref);
    if (std::abs(score - testsupport::NestedLoopBertScore(gen, ref)) <=
        kBertScoreTol) {
      ++sbs_ok;
    }
    if (std::abs(eval::SpeechBertScoreRows(gen, gen) - 1.0) <= kBertScoreTol) {
      ++self_ok;
    }
  }

  result.pass = mismatches == 0 && sbs_ok == kBertScorePairs &&
                self_ok == kBertScorePairs;
  std::ostringstream detail;
  detail << "edit pairs " << pairs << " (mismatches " << mismatches
         << "), similarity " << sbs_ok << "/" << kBertScorePairs << ", self "
         << self_ok << "/" << kBertScorePairs << ", " << Seconds(start);
  result.detail = detail.str();
  return result;
}

// ---------------------------------------------------------------------------
// 4/9: first-shadow references scored against themselves are error free.

CriterionResult CheckSelfReferenceRows() {
  CriterionResult result{"self-evaluated references have zero error rates"};
  const PipelineFixture& fixture = PipelineFixture::Get();
  if (!fixture.error.empty()) {
    result.detail = "pipeline fixture failed: " + fixture.error;
    return result;
  }
  const cli::PipelineConfig& config = fixture.config;

  const data::Manifest manifest = data::LoadManifest(config.paths.manifest);
  const data::FeatureSequence codebook =
      data::ReadFeatureContainer(config.eval.codebook);
  const eval::MockAsrProvider asr(codebook.data, codebook.Frames() - 1,
                                  config.synthetic.sample_rate_hz);

  const auto reference = [&config](const data::TripletRecord& record) {
    return data::ReadFeatureContainer(
        fs::path(config.paths.feature_dir) / "mel" / "L1_S1" /
        (record.utterance_id + ".vshd"));
  };

  int scored = 0;
  int zero_rows = 0;
  for (const data::Split split :
       {data::Split::kTrain, data::Split::kDev, data::Split::kTest}) {
    eval::SystemOutputs outputs;
    outputs.label = "self";
    for (const data::TripletRecord* record : manifest.SplitRecords(split)) {
      outputs.features[record->utterance_id] = reference(*record);
    }
    eval::EvalSettings settings;
    settings.split = split;
    const eval::EvalReport report = eval::EvaluateSystem(
        outputs, manifest, asr, nullptr, reference, nullptr, settings);
    if (!report.warnings.empty()) {
      result.detail = "unexpected warnings in split " + data::SplitName(split);
      return result;
    }
    for (const eval::EvalRow& row : report.rows) {
      ++scored;
      if (row.s1_wer == 0.0 && row.s1_cer == 0.0) ++zero_rows;
    }
  }
  result.pass = scored == 50 && zero_rows == scored;
  std::ostringstream detail;
  detail << zero_rows << "/" << scored << " utterances with WER=CER=0";
  result.detail = detail.str();
  return result;
}

// ---------------------------------------------------------------------------
// 5/9: stage-2 freezing leaves the mandated groups bit-identical.

std::vector<s2s::TrainPair> RandomPairs(int count, int src_dim, int tgt_dim,
                                        std::uint64_t seed) {
  Rng rng(seed);
  std::vector<s2s::TrainPair> pairs(count);
  for (s2s::TrainPair& pair : pairs) {
    const int t_src = rng.UniformInt(4, 6);
    const int t_tgt = t_src + rng.UniformInt(1, 3);
    pair.source.resize(t_src, src_dim);
    pair.target.resize(t_tgt, tgt_dim);
    for (int i = 0; i < t_src; ++i) {
      for (int j = 0; j < src_dim; ++j) pair.source(i, j) = rng.Normal();
    }
    for (int i = 0; i < t_tgt; ++i) {
      for (int j = 0; j < tgt_dim; ++j) pair.target(i, j) = rng.Normal();
    }
  }
  return pairs;
}

CriterionResult CheckFreezingInvariants() {
  CriterionResult result{"stage-2 phases keep frozen groups bit-identical"};
  s2s::ModelConfig model_config;
  model_config.source_dim = 12;
  model_config.target_dim = 10;
  model_config.hidden_dim = 16;
  model_config.num_encoder_blocks = 1;
  model_config.num_decoder_blocks = 1;
  model_config.attention_heads = 2;
  model_config.dropout = 0.0;
  model_config.alignment_dim = 8;

  s2s::TrainConfig train;
  train.steps = 12;
  train.batch_size = 3;
  train.seed = 404;

  const std::vector<s2s::TrainPair> pairs = RandomPairs(6, 12, 10, 505);

  s2s::PhaseConfig dec1;
  dec1.phase = s2s::Phase::kDecFtStage1;
  dec1.name = "dec_ft_stage1";
  dec1.source_role = data::Role::kL2R;
  dec1.target_role = data::Role::kL1SS;
  const s2s::PhaseResult stage1 =
      s2s::RunPhase(dec1, model_config, train, pairs, nullptr);

  s2s::PhaseConfig dec2 = dec1;
  dec2.phase = s2s::Phase::kDecFtStage2;
  dec2.name = "dec_ft_stage2";
  dec2.target_role = data::Role::kL1S1;
  dec2.init_from = "stage1";
  const s2s::PhaseResult stage2 =
      s2s::RunPhase(dec2, model_config, train, pairs, &stage1.checkpoint);

  const bool decoder_frozen_side =
      stage1.checkpoint.Group("encoder").fingerprint ==
          stage2.checkpoint.Group("encoder").fingerprint &&
      stage1.checkpoint.Group("duration_predictor").fingerprint ==
          stage2.checkpoint.Group("duration_predictor").fingerprint &&
      stage1.checkpoint.Group("decoder").fingerprint !=
          stage2.checkpoint.Group("decoder").fingerprint;

  s2s::PhaseConfig enc1;
  enc1.phase = s2s::Phase::kEncFtStage1;
  enc1.name = "enc_ft_stage1";
  enc1.source_role = data::Role::kL1SS;
  enc1.source_feature = data::FeatureKind::kPpgBnf;
  enc1.target_role = data::Role::kL1S1;
  const s2s::PhaseResult enc_stage1 =
      s2s::RunPhase(enc1, model_config, train, pairs, nullptr);

  s2s::PhaseConfig enc2;
  enc2.phase = s2s::Phase::kEncFtStage2;
  enc2.name = "enc_ft_stage2";
  enc2.source_role = data::Role::kL2R;
  enc2.source_feature = data::FeatureKind::kS3r;
  enc2.target_role = data::Role::kL1S1;
  enc2.init_from = "enc_stage1";
  const std::vector<s2s::TrainPair> wide_pairs = RandomPairs(6, 20, 10, 606);
  s2s::ModelConfig wide_config = model_config;
  wide_config.source_dim = 20;
  const s2s::PhaseResult enc_stage2 = s2s::RunPhase(
      enc2, wide_config, train, wide_pairs, &enc_stage1.checkpoint);

  const bool encoder_frozen_side =
      enc_stage1.checkpoint.Group("decoder").fingerprint ==
          enc_stage2.checkpoint.Group("decoder").fingerprint &&
      enc_stage1.checkpoint.Group("encoder").fingerprint !=
          enc_stage2.checkpoint.Group("encoder").fingerprint;

  result.pass = decoder_frozen_side && encoder_frozen_side;
  result.detail = std::string("dec_ft_stage2 encoder ") +
                  (decoder_frozen_side ? "frozen" : "CHANGED") +
                  ", enc_ft_stage2 decoder " +
                  (encoder_frozen_side ? "frozen" : "CHANGED");
  return result;
}

// ---------------------------------------------------------------------------
// 6/9: toy training halves the smoothed reconstruction loss and aligns
// quasi-diagonally.

CriterionResult CheckToyTraining() {
  CriterionResult result{"toy training halves loss with diagonal alignment"};
  const auto start = std::chrono::steady_clock::now();
  const PipelineFixture& fixture = PipelineFixture::Get();
  if (!fixture.error.empty()) {
    result.detail = "pipeline fixture failed: " + fixture.error;
    return result;
  }
  const cli::PipelineConfig& config = fixture.config;

  // Smoothed reconstruction loss from the persisted training log.
  std::ifstream log_file(config.paths.checkpoint_dir + "/one_step.log.jsonl");
  std::vector<double> recon;
  std::string line;
  while (std::getline(log_file, line)) {
    const json row = json::parse(line);
    if (row.contains("recon")) recon.push_back(row.at("recon").get<double>());
  }
  if (static_cast<int>(recon.size()) < 2 * kLossSmoothWindow) {
    result.detail = "training log too short";
    return result;
  }
  double initial = 0.0;
  double final_loss = 0.0;
  for (int k = 0; k < kLossSmoothWindow; ++k) {
    initial += recon[k];
    final_loss += recon[recon.size() - 1 - k];
  }
  initial /= kLossSmoothWindow;
  final_loss /= kLossSmoothWindow;
  const bool loss_ok = final_loss <= kLossHalfRatio * initial;

  // Alignment of the first train pair under the trained model.
  const s2s::Checkpoint ckpt = s2s::LoadCheckpoint(
      config.paths.checkpoint_dir + "/one_step.vsck");
  s2s::Model model = s2s::RestoreModel(ckpt, 1);
  const data::Manifest manifest = data::LoadManifest(config.paths.manifest);
  const data::TripletRecord* pair_record =
      manifest.SplitRecords(data::Split::kTrain).front();
  const data::FeatureSequence src = data::ReadFeatureContainer(
      fs::path(config.paths.feature_dir) / "s3r" / "L2_R" /
      (pair_record->utterance_id + ".vshd"));
  const data::FeatureSequence tgt = data::ReadFeatureContainer(
      fs::path(config.paths.feature_dir) / "mel" / "L1_SS" /
      (pair_record->utterance_id + ".vshd"));

  const Eigen::MatrixXd enc = model.Encode(src);
  const align::ScoreMatrix scores =
      model.SoftAlignment(enc, tgt.data.cast<double>());
  const align::AlignmentPath path = align::Mas(scores);
  const double t_src = static_cast<double>(src.Frames());
  const double t_tgt = static_cast<double>(tgt.Frames());
  int in_band = 0;
  for (const auto& [i, j] : path.steps) {
    if (std::abs(i * t_tgt / t_src - j) <= kDiagonalBand) ++in_band;
  }
  const double mass =
      static_cast<double>(in_band) / static_cast<double>(path.steps.size());
  const bool diag_ok = mass >= kDiagonalMassFrac;

  result.pass = loss_ok && diag_ok;
  std::ostringstream detail;
  detail.setf(std::ios::fixed);
  detail.precision(3);
  detail << "recon " << initial << " -> " << final_loss << " (ratio "
         << final_loss / initial << "), diagonal mass " << mass << ", "
         << Seconds(start);
  result.detail = detail.str();
  return result;
}

// ---------------------------------------------------------------------------
// 7/9: the trained system beats the untrained one in both directions.

CriterionResult CheckOrderingMirror() {
  CriterionResult result{"trained system beats untrained on both metrics"};
  const PipelineFixture& fixture = PipelineFixture::Get();
  if (!fixture.error.empty()) {
    result.detail = "pipeline fixture failed: " + fixture.error;
    return result;
  }
  const cli::PipelineConfig& config = fixture.config;

  const json trained =
      ReadSummaryRecord(config.paths.report_dir + "/one_step.jsonl");
  const json untrained =
      ReadSummaryRecord(config.paths.report_dir + "/untrained.jsonl");
  const double trained_wer = trained.at("mean_s1_wer").get<double>();
  const double untrained_wer = untrained.at("mean_s1_wer").get<double>();
  const double trained_sbs =
      trained.at("mean_speech_bert_score").get<double>();
  const double untrained_sbs =
      untrained.at("mean_speech_bert_score").get<double>();

  result.pass = trained_wer < untrained_wer && trained_sbs > untrained_sbs;
  std::ostringstream detail;
  detail.setf(std::ios::fixed);
  detail.precision(4);
  detail << "S1-WER " << trained_wer << " vs " << untrained_wer
         << ", similarity " << trained_sbs << " vs " << untrained_sbs;
  result.detail = detail.str();
  return result;
}

// ---------------------------------------------------------------------------
// 8/9: flagged warping steps recover the corrupted segments.

CriterionResult CheckDisfluencyRecovery() {
  CriterionResult result{"warping flags recover corrupted segments"};
  const PipelineFixture& fixture = PipelineFixture::Get();
  if (!fixture.error.empty()) {
    result.detail = "pipeline fixture failed: " + fixture.error;
    return result;
  }
  const cli::PipelineConfig& config = fixture.config;
  const data::Manifest manifest = data::LoadManifest(config.paths.manifest);
  const std::string latents = config.paths.corpus_dir + "/latents";
  const auto latent = [&latents](const std::string& id, const char* role) {
    return data::ReadFeatureContainer(fs::path(latents) / role /
                                      (id + ".vshd"));
  };

  // Default threshold: pooled dev-split calibration.
  std::vector<Eigen::VectorXd> pooled;
  for (const data::TripletRecord* record :
       manifest.SplitRecords(data::Split::kDev)) {
    const align::DisfluencyProfile profile = align::ComputeDisfluencyProfile(
        latent(record->utterance_id, "L1_S1"),
        latent(record->utterance_id, "L1_SS"), align::FrameMetric::kCosine,
        std::numeric_limits<double>::infinity());
    pooled.push_back(profile.per_step_distance);
  }
  const double threshold = align::CalibrateThreshold(pooled);

  int corrupted_segments = 0;
  int recovered_segments = 0;
  long flagged_steps = 0;
  long flagged_inside = 0;
  for (const data::TripletRecord& record : manifest.records) {
    const align::DisfluencyProfile profile = align::ComputeDisfluencyProfile(
        latent(record.utterance_id, "L1_S1"),
        latent(record.utterance_id, "L1_SS"), align::FrameMetric::kCosine,
        threshold);
    const data::SyntheticTruth truth = data::LoadSyntheticTruth(
        config.paths.corpus_dir + "/truth/" + record.utterance_id + ".json");

    for (const data::TruthSegment& segment : truth.segments) {
      if (!segment.corrupted) continue;
      ++corrupted_segments;
      bool touched = false;
      for (std::size_t s = 0; s < profile.path.steps.size(); ++s) {
        const int i = profile.path.steps[s].first;
        if (profile.segment_flags[s] && i >= segment.start &&
            i < segment.end) {
          touched = true;
        }
      }
      if (touched) ++recovered_segments;
    }
    for (std::size_t s = 0; s < profile.path.steps.size(); ++s) {
      if (!profile.segment_flags[s]) continue;
      ++flagged_steps;
      const int i = profile.path.steps[s].first;
      for (const data::TruthSegment& segment : truth.segments) {
        if (segment.corrupted && i >= segment.start && i < segment.end) {
          ++flagged_inside;
          break;
        }
      }
    }
  }

  const double recall =
      corrupted_segments == 0
          ? 0.0
          : static_cast<double>(recovered_segments) / corrupted_segments;
  const double precision =
      flagged_steps == 0 ? 0.0
                         : static_cast<double>(flagged_inside) / flagged_steps;
  result.pass = corrupted_segments > 0 && recall >= kRecallFloor &&
                precision >= kPrecisionFloor;
  std::ostringstream detail;
  detail.setf(std::ios::fixed);
  detail.precision(3);
  detail << "recall " << recall << " (" << recovered_segments << "/"
         << corrupted_segments << "), precision " << precision << " ("
         << flagged_inside << "/" << flagged_steps << "), threshold "
         << threshold;
  result.detail = detail.str();
  return result;
}

// ---------------------------------------------------------------------------
// 9/9: two full runs with the same seed produce bit-identical reports.

std::string ReadBytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("missing report: " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

CriterionResult CheckDeterministicReplay() {
  CriterionResult result{"same-seed replays produce bit-identical reports"};
  const auto start = std::chrono::steady_clock::now();
  const fs::path root = fs::temp_directory_path() / "vshadow_acceptance";
  std::vector<cli::PipelineConfig> configs;
  for (const char* leaf : {"replay_a", "replay_b"}) {
    const std::string work = (root / leaf).string();
    fs::remove_all(work);
    fs::create_directories(work);
    cli::PipelineConfig config = MakeConfig(work, kReplaySeed, 20, 60);
    std::ostringstream sink;
    RunPipelineOnce(config, sink);
    configs.push_back(std::move(config));
  }

  int compared = 0;
  int equal = 0;
  for (const char* name :
       {"one_step.txt", "one_step.jsonl", "untrained.txt",
        "untrained.jsonl"}) {
    ++compared;
    const std::string a =
        ReadBytes(fs::path(configs[0].paths.report_dir) / name);
    const std::string b =
        ReadBytes(fs::path(configs[1].paths.report_dir) / name);
    if (a == b) ++equal;
  }
  result.pass = equal == compared;
  std::ostringstream detail;
  detail << equal << "/" << compared << " report files identical, "
         << Seconds(start);
  result.detail = detail.str();
  return result;
}

}  // namespace
}  // namespace vshadow

int main() {
  using vshadow::CriterionResult;
  std::vector<CriterionResult (*)()> checks = {
      vshadow::CheckDpKernels,          vshadow::CheckForwardSumGradient,
      vshadow::CheckMetricOracles,      vshadow::CheckSelfReferenceRows,
      vshadow::CheckFreezingInvariants, vshadow::CheckToyTraining,
      vshadow::CheckOrderingMirror,     vshadow::CheckDisfluencyRecovery,
      vshadow::CheckDeterministicReplay};

  std::vector<CriterionResult> results;
  for (std::size_t k = 0; k < checks.size(); ++k) {
    CriterionResult result;
    try {
      result = checks[k]();
    } catch (const std::exception& e) {
      result.name = "criterion " + std::to_string(k + 1);
      result.pass = false;
      result.detail = std::string("exception: ") + e.what();
    }
    results.push_back(result);
  }

  int failures = 0;
  for (std::size_t k = 0; k < results.size(); ++k) {
    const CriterionResult& result = results[k];
    if (!result.pass) ++failures;
    std::cout << "[" << (result.pass ? "PASS" : "FAIL") << "] " << (k + 1)
              << "/9 " << result.name << " (" << result.detail << ")\n";
  }
  if (failures == 0) {
    std::cout << "acceptance: all 9 criteria passed\n";
  } else {
    std::cout << "acceptance: " << failures << " criteria FAILED\n";
  }
  return failures == 0 ? 0 : 1;
}
