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

#ifndef VSHADOW_S2S_CHECKPOINT_HPP_
#define VSHADOW_S2S_CHECKPOINT_HPP_

#include <string>
#include <vector>

#include "vshadow/s2s/model.hpp"

namespace vshadow::s2s {

struct ParamBlob {
  std::string name;
  int rows = 0;
  int cols = 0;
  std::vector<double> data;  // row-major
};

struct GroupBlob {
  std::string name;
  std::vector<ParamBlob> params;
  std::string fingerprint;  // hex FNV-1a over names, shapes and payloads
};

/// Full model snapshot. Fingerprints are always recomputable from the
/// stored parameters; file IO verifies them on load.
struct Checkpoint {
  int version = 1;
  ModelConfig config;
  int step = 0;
  std::vector<std::string> changed_groups;
  std::vector<GroupBlob> groups;

  const GroupBlob& Group(const std::string& name) const;
  bool HasGroup(const std::string& name) const;
};

std::string FingerprintGroup(const GroupBlob& group);

/// Snapshot of the model's current parameters; groups sorted by name.
Checkpoint SnapshotModel(Model& model,
                         const std::vector<std::string>& changed_groups);

/// Fresh model from config (seeded init), then all groups overwritten
/// from the checkpoint. Shape mismatches are errors.
Model RestoreModel(const Checkpoint& checkpoint, std::uint64_t seed);

/// Overwrites only the named groups of an existing model, e.g. carrying a
/// decoder into a rebuilt-encoder model. Dims must agree.
void LoadGroupsInto(const Checkpoint& checkpoint,
                    const std::vector<std::string>& group_names,
                    Model* model);

/// Container format "VSCK1": magic, little-endian u32 header length, json
/// header (config, step, groups, fingerprints), float64 payloads in group
/// order. Writes are atomic (temp file + rename).
void SaveCheckpoint(const Checkpoint& checkpoint, const std::string& path);
Checkpoint LoadCheckpoint(const std::string& path);

}  // namespace vshadow::s2s

#endif  // VSHADOW_S2S_CHECKPOINT_HPP_
