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

#include "vshadow/s2s/phases.hpp"

#include <algorithm>

namespace vshadow::s2s {

std::string PhaseName(Phase phase) {
  switch (phase) {
    case Phase::kOneStep:
      return "one_step";
    case Phase::kEncFtStage1:
      return "enc_ft_stage1";
    case Phase::kEncFtStage2:
      return "enc_ft_stage2";
    case Phase::kDecFtStage1:
      return "dec_ft_stage1";
    case Phase::kDecFtStage2:
      return "dec_ft_stage2";
  }
  throw Error("unknown phase");
}

Phase PhaseFromName(const std::string& name) {
  if (name == "one_step") return Phase::kOneStep;
  if (name == "enc_ft_stage1") return Phase::kEncFtStage1;
  if (name == "enc_ft_stage2") return Phase::kEncFtStage2;
  if (name == "dec_ft_stage1") return Phase::kDecFtStage1;
  if (name == "dec_ft_stage2") return Phase::kDecFtStage2;
  throw Error("unknown phase: " + name);
}

void PhaseConfig::Validate() const {
  if (source_role != data::Role::kL2R && source_role != data::Role::kL1SS) {
    throw Error(PhaseName(phase) + ": source_role must be L2_R or L1_SS");
  }
  if (target_role != data::Role::kL1S1 && target_role != data::Role::kL1SS) {
    throw Error(PhaseName(phase) + ": target_role must be L1_S1 or L1_SS");
  }
  if (target_feature != data::FeatureKind::kMel &&
      target_feature != data::FeatureKind::kPpgBnf) {
    // Posterior-style and spectral targets converge; the raw
    // self-supervised space does not and is rejected up front.
    throw Error(PhaseName(phase) +
                ": target_feature must be mel or ppg_bnf");
  }
  for (const std::string& g : frozen_groups) {
    if (std::find(kAllGroups.begin(), kAllGroups.end(), g) ==
        kAllGroups.end()) {
      throw Error("unknown frozen group: " + g);
    }
  }
  switch (phase) {
    case Phase::kOneStep:
      if (!frozen_groups.empty()) {
        throw Error("one_step trains all groups; frozen_groups must be empty");
      }
      break;
    case Phase::kEncFtStage1:
      if (source_role != data::Role::kL1SS ||
          target_role != data::Role::kL1S1) {
        throw Error("enc_ft_stage1 trains L1_SS -> L1_S1");
      }
      if (source_feature != data::FeatureKind::kPpgBnf) {
        throw Error("enc_ft_stage1 requires the ppg_bnf source feature");
      }
      if (!frozen_groups.empty()) {
        throw Error("enc_ft_stage1 trains all groups");
      }
      break;
    case Phase::kEncFtStage2:
      if (source_role != data::Role::kL2R) {
        throw Error("enc_ft_stage2 requires source_role L2_R");
      }
      break;
    case Phase::kDecFtStage1:
      if (source_role != data::Role::kL2R ||
          target_role != data::Role::kL1SS) {
        throw Error("dec_ft_stage1 trains L2_R -> L1_SS");
      }
      if (!frozen_groups.empty()) {
        throw Error("dec_ft_stage1 trains all groups");
      }
      break;
    case Phase::kDecFtStage2:
      if (target_role != data::Role::kL1S1) {
        throw Error("dec_ft_stage2 requires target_role L1_S1");
      }
      break;
  }
}

std::set<std::string> PhaseConfig::EffectiveFrozenGroups() const {
  std::set<std::string> frozen = frozen_groups;
  if (phase == Phase::kEncFtStage2) {
    frozen.insert(kGroupDecoder);
    if (freeze_duration_predictor) frozen.insert(kGroupDurationPredictor);
  } else if (phase == Phase::kDecFtStage2) {
    frozen.insert(kGroupEncoder);
    if (freeze_duration_predictor) frozen.insert(kGroupDurationPredictor);
  }
  return frozen;
}

bool PhaseConfig::RequiresInitCheckpoint() const {
  return phase == Phase::kEncFtStage2 || phase == Phase::kDecFtStage2;
}

PhaseResult RunPhase(const PhaseConfig& phase, const ModelConfig& base_config,
                     const TrainConfig& train,
                     const std::vector<TrainPair>& pairs,
                     const Checkpoint* init) {
  phase.Validate();
  if (phase.RequiresInitCheckpoint() && init == nullptr) {
    throw Error(PhaseName(phase.phase) + " requires an init checkpoint");
  }
  if (pairs.empty()) {
    throw Error("no training pairs for phase " + PhaseName(phase.phase));
  }
  if (train.steps < 1 || train.batch_size < 1) {
    throw Error("steps and batch_size must be positive");
  }

  Rng rng(train.seed);
  Model model;
  switch (phase.phase) {
    case Phase::kOneStep:
    case Phase::kEncFtStage1:
    case Phase::kDecFtStage1:
      model = Model(base_config, rng.NextU64());
      break;
    case Phase::kDecFtStage2: {
      // Same dims as stage 1; continue from its parameters.
      model = RestoreModel(*init, rng.NextU64());
      break;
    }
    case Phase::kEncFtStage2: {
      // New source dim: rebuild encoder and alignment, carry the decoder
      // (and duration predictor) over from stage 1.
      if (init->config.target_dim != base_config.target_dim ||
          init->config.hidden_dim != base_config.hidden_dim) {
        throw Error(
            "enc_ft_stage2 config must keep stage-1 hidden and target dims");
      }
      model = Model(base_config, rng.NextU64());
      std::vector<std::string> carried = {kGroupDecoder};
      if (phase.freeze_duration_predictor) {
        carried.push_back(kGroupDurationPredictor);
      }
      LoadGroupsInto(*init, carried, &model);
      break;
    }
  }

  for (const TrainPair& p : pairs) {
    if (p.source.cols() != model.Config().source_dim ||
        p.target.cols() != model.Config().target_dim) {
      throw Error("training pair dims do not match phase model config");
    }
  }

  const std::set<std::string> frozen = phase.EffectiveFrozenGroups();
  AdamConfig adam;
  adam.lr = train.lr;

  PhaseResult result;
  const int n = static_cast<int>(pairs.size());
  for (int step = 0; step < train.steps; ++step) {
    std::vector<TrainPair> batch;
    batch.reserve(train.batch_size);
    for (int b = 0; b < train.batch_size; ++b) {
      batch.push_back(pairs[static_cast<size_t>(rng.UniformInt(0, n - 1))]);
    }
    TrainLogRow row;
    row.step = step + 1;
    row.losses = model.TrainStep(batch, frozen, adam);
    result.log.push_back(row);
  }

  std::vector<std::string> changed;
  for (const std::string& g : kAllGroups) {
    if (!frozen.count(g)) changed.push_back(g);
  }
  result.checkpoint = SnapshotModel(model, changed);
  return result;
}

}  // namespace vshadow::s2s
