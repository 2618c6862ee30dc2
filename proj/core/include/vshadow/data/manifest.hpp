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

#ifndef VSHADOW_DATA_MANIFEST_HPP_
#define VSHADOW_DATA_MANIFEST_HPP_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vshadow/common.hpp"

namespace vshadow::data {

/// The three utterances of one shadowing sample: the learner's read-aloud
/// recording, the native rater's first (unscripted) shadowing, and the
/// rater's script-shadowing.
enum class Role { kL2R, kL1S1, kL1SS };

enum class Split { kTrain, kDev, kTest };

std::string RoleName(Role role);
Role RoleFromName(const std::string& name);
std::string SplitName(Split split);
Split SplitFromName(const std::string& name);

constexpr Role kAllRoles[] = {Role::kL2R, Role::kL1S1, Role::kL1SS};

struct TripletRecord {
  std::string utterance_id;
  std::map<Role, std::string> role_paths;   // all three roles required
  std::string script;                       // read-aloud text
  std::map<Role, std::string> transcripts;  // optional, per role
  Split split = Split::kTrain;
  // Audio properties are carried as optional metadata; nothing assumes a
  // particular rate or channel count.
  std::optional<int> sample_rate_hz;
  std::optional<int> channels;

  void Validate() const;
  bool operator==(const TripletRecord& other) const = default;
};

struct Manifest {
  int version = 1;
  std::vector<TripletRecord> records;

  /// Throws unless non-empty, ids unique, and all records valid.
  void Validate() const;
  bool operator==(const Manifest& other) const = default;

  std::vector<const TripletRecord*> SplitRecords(Split split) const;
  const TripletRecord& Find(const std::string& utterance_id) const;
};

/// Line-delimited records, one JSON object per line. Each line carries the
/// manifest version under "v"; mixed versions in one file are rejected.
Manifest LoadManifest(const std::filesystem::path& path);
void SaveManifest(const Manifest& manifest,
                  const std::filesystem::path& path);

}  // namespace vshadow::data

#endif  // VSHADOW_DATA_MANIFEST_HPP_
