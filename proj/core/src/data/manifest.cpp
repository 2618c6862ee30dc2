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

#include "vshadow/data/manifest.hpp"

#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

namespace vshadow::data {

std::string RoleName(Role role) {
  switch (role) {
    case Role::kL2R:
      return "L2_R";
    case Role::kL1S1:
      return "L1_S1";
    case Role::kL1SS:
      return "L1_SS";
  }
  throw Error("unknown role");
}

Role RoleFromName(const std::string& name) {
  if (name == "L2_R") return Role::kL2R;
  if (name == "L1_S1") return Role::kL1S1;
  if (name == "L1_SS") return Role::kL1SS;
  throw Error("unknown role: '" + name + "'");
}

std::string SplitName(Split split) {
  switch (split) {
    case Split::kTrain:
      return "train";
    case Split::kDev:
      return "dev";
    case Split::kTest:
      return "test";
  }
  throw Error("unknown split");
}

Split SplitFromName(const std::string& name) {
  if (name == "train") return Split::kTrain;
  if (name == "dev") return Split::kDev;
  if (name == "test") return Split::kTest;
  throw Error("unknown split: '" + name + "'");
}

void TripletRecord::Validate() const {
  if (utterance_id.empty()) throw Error("record has empty utterance_id");
  for (Role role : kAllRoles) {
    auto it = role_paths.find(role);
    if (it == role_paths.end() || it->second.empty()) {
      throw Error("record '" + utterance_id + "' is missing role " +
                  RoleName(role));
    }
  }
}

void Manifest::Validate() const {
  if (records.empty()) throw Error("empty manifest");
  std::set<std::string> seen;
  for (const auto& record : records) {
    record.Validate();
    if (!seen.insert(record.utterance_id).second) {
      throw Error("duplicate utterance_id '" + record.utterance_id + "'");
    }
  }
}

std::vector<const TripletRecord*> Manifest::SplitRecords(Split split) const {
  std::vector<const TripletRecord*> out;
  for (const auto& record : records) {
    if (record.split == split) out.push_back(&record);
  }
  return out;
}

const TripletRecord& Manifest::Find(const std::string& utterance_id) const {
  for (const auto& record : records) {
    if (record.utterance_id == utterance_id) return record;
  }
  throw Error("utterance_id not in manifest: '" + utterance_id + "'");
}

namespace {

TripletRecord RecordFromJson(const nlohmann::json& obj) {
  TripletRecord record;
  record.utterance_id = obj.at("utterance_id").get<std::string>();
  for (const auto& [key, value] : obj.at("role_paths").items()) {
    record.role_paths[RoleFromName(key)] = value.get<std::string>();
  }
  record.script = obj.value("script", std::string());
  if (obj.contains("transcripts")) {
    for (const auto& [key, value] : obj.at("transcripts").items()) {
      record.transcripts[RoleFromName(key)] = value.get<std::string>();
    }
  }
  record.split = SplitFromName(obj.at("split").get<std::string>());
  if (obj.contains("sample_rate_hz")) {
    record.sample_rate_hz = obj.at("sample_rate_hz").get<int>();
  }
  if (obj.contains("channels")) {
    record.channels = obj.at("channels").get<int>();
  }
  return record;
}

nlohmann::json RecordToJson(const TripletRecord& record, int version) {
  nlohmann::json obj;
  obj["v"] = version;
  obj["utterance_id"] = record.utterance_id;
  nlohmann::json paths;
  for (const auto& [role, path] : record.role_paths) {
    paths[RoleName(role)] = path;
  }
  obj["role_paths"] = paths;
  obj["script"] = record.script;
  if (!record.transcripts.empty()) {
    nlohmann::json transcripts;
    for (const auto& [role, text] : record.transcripts) {
      transcripts[RoleName(role)] = text;
    }
    obj["transcripts"] = transcripts;
  }
  obj["split"] = SplitName(record.split);
  if (record.sample_rate_hz) obj["sample_rate_hz"] = *record.sample_rate_hz;
  if (record.channels) obj["channels"] = *record.channels;
  return obj;
}

}  // namespace

Manifest LoadManifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open manifest: " + path.string());

  Manifest manifest;
  bool version_set = false;
  std::string line;
  int line_number = 0;
  std::set<std::string> seen;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
      const int v = obj.value("v", 1);
      if (!version_set) {
        manifest.version = v;
        version_set = true;
      } else if (v != manifest.version) {
        throw ParseError("mixed manifest versions", line_number);
      }
      TripletRecord record = RecordFromJson(obj);
      record.Validate();
      if (!seen.insert(record.utterance_id).second) {
        throw Error("duplicate utterance_id '" + record.utterance_id + "'");
      }
      manifest.records.push_back(std::move(record));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("manifest parse error: ") + e.what(),
                       line_number);
    }
  }
  if (manifest.records.empty()) {
    throw Error("empty manifest: " + path.string());
  }
  return manifest;
}

void SaveManifest(const Manifest& manifest,
                  const std::filesystem::path& path) {
  manifest.Validate();
  std::ofstream out(path);
  if (!out) throw Error("cannot open for writing: " + path.string());
  for (const auto& record : manifest.records) {
    out << RecordToJson(record, manifest.version).dump() << "\n";
  }
  if (!out) throw Error("write failed: " + path.string());
}

}  // namespace vshadow::data
