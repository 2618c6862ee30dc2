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

#ifndef VSHADOW_S2S_PHASES_HPP_
#define VSHADOW_S2S_PHASES_HPP_

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "vshadow/data/manifest.hpp"
#include "vshadow/s2s/checkpoint.hpp"
#include "vshadow/s2s/model.hpp"

namespace vshadow::s2s {

/// Training regimes:
///   one_step       - single direct mapping, all groups trained.
///   enc_ft_stage1  - script-shadow to first-shadow pretraining on the
///                    rater's own speech, bottleneck-posterior source.
///   enc_ft_stage2  - encoder rebuilt for the learner-side source feature
///                    and retrained; decoder carried over frozen.
///   dec_ft_stage1  - learner source to script-shadow target, all trained.
///   dec_ft_stage2  - encoder frozen, decoder fine-tuned toward the
///                    first-shadow target.
enum class Phase {
  kOneStep,
  kEncFtStage1,
  kEncFtStage2,
  kDecFtStage1,
  kDecFtStage2,
};

std::string PhaseName(Phase phase);
Phase PhaseFromName(const std::string& name);

struct PhaseConfig {
  Phase phase = Phase::kOneStep;
  std::string name;  // instance label used for artifact file names
  data::Role source_role = data::Role::kL2R;
  data::FeatureKind source_feature = data::FeatureKind::kMel;
  data::Role target_role = data::Role::kL1SS;
  data::FeatureKind target_feature = data::FeatureKind::kMel;
  std::set<std::string> frozen_groups;
  // Stage-2 phases keep the duration predictor frozen alongside the
  // mandated group by default; flip to fine-tune it as well.
  bool freeze_duration_predictor = true;
  std::string init_from;  // checkpoint path for stage-2 phases

  /// Enforces the per-phase role/feature/freezing rules; throws Error.
  void Validate() const;

  /// frozen_groups plus the groups the phase itself mandates.
  std::set<std::string> EffectiveFrozenGroups() const;

  bool RequiresInitCheckpoint() const;
};

struct TrainConfig {
  int steps = 200;
  int batch_size = 6;
  double lr = 1e-3;
  std::uint64_t seed = 1234;
};

struct TrainLogRow {
  int step = 0;
  LossBreakdown losses;
};

struct PhaseResult {
  Checkpoint checkpoint;
  std::vector<TrainLogRow> log;
};

/// Trains one phase over the given pairs. For enc_ft_stage2 the encoder
/// and alignment are freshly initialized for the new source dim while
/// decoder (and by default duration predictor) come from `init`; for
/// dec_ft_stage2 the whole model restores from `init`. The result's
/// changed_groups lists every group that was trainable.
PhaseResult RunPhase(const PhaseConfig& phase, const ModelConfig& base_config,
                     const TrainConfig& train,
                     const std::vector<TrainPair>& pairs,
                     const Checkpoint* init);

}  // namespace vshadow::s2s

#endif  // VSHADOW_S2S_PHASES_HPP_
