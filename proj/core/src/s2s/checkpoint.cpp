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

#include "vshadow/s2s/checkpoint.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "json.hpp"

namespace vshadow::s2s {

namespace {

constexpr char kMagic[] = "VSCK1";
constexpr std::size_t kMagicLen = 5;
constexpr std::uint32_t kMaxHeaderBytes = 8u << 20;

static_assert(sizeof(double) == 8, "float64 payload layout");

}  // namespace

const GroupBlob& Checkpoint::Group(const std::string& name) const {
  for (const GroupBlob& g : groups) {
    if (g.name == name) return g;
  }
  throw Error("checkpoint has no group '" + name + "'");
}

bool Checkpoint::HasGroup(const std::string& name) const {
  for (const GroupBlob& g : groups) {
    if (g.name == name) return true;
  }
  return false;
}

std::string FingerprintGroup(const GroupBlob& group) {
  std::uint64_t h = Fnv1a64(group.name.data(), group.name.size());
  for (const ParamBlob& p : group.params) {
    h = Fnv1a64Extend(h, p.name.data(), p.name.size());
    const std::int64_t shape[2] = {p.rows, p.cols};
    h = Fnv1a64Extend(h, shape, sizeof(shape));
    h = Fnv1a64Extend(h, p.data.data(), p.data.size() * sizeof(double));
  }
  return ToHex(h);
}

Checkpoint SnapshotModel(Model& model,
                         const std::vector<std::string>& changed_groups) {
  Checkpoint out;
  out.config = model.Config();
  out.step = model.Step();
  out.changed_groups = changed_groups;
  for (auto& [name, params] : model.Groups()) {
    GroupBlob group;
    group.name = name;
    for (const Parameter* p : params) {
      ParamBlob blob;
      blob.name = p->name;
      blob.rows = static_cast<int>(p->value.rows());
      blob.cols = static_cast<int>(p->value.cols());
      blob.data.resize(static_cast<std::size_t>(p->value.size()));
      for (int r = 0; r < blob.rows; ++r) {
        for (int c = 0; c < blob.cols; ++c) {
          blob.data[static_cast<std::size_t>(r) * blob.cols + c] =
              p->value(r, c);
        }
      }
      group.params.push_back(std::move(blob));
    }
    group.fingerprint = FingerprintGroup(group);
    out.groups.push_back(std::move(group));
  }
  return out;
}

void LoadGroupsInto(const Checkpoint& checkpoint,
                    const std::vector<std::string>& group_names,
                    Model* model) {
  auto groups = model->Groups();
  for (const std::string& name : group_names) {
    const GroupBlob& stored = checkpoint.Group(name);
    auto it = groups.find(name);
    if (it == groups.end()) {
      throw Error("model has no group '" + name + "'");
    }
    ParamRefs& params = it->second;
    if (params.size() != stored.params.size()) {
      throw Error("group '" + name + "' parameter count mismatch");
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
      const ParamBlob& blob = stored.params[i];
      Parameter* p = params[i];
      if (p->name != blob.name || p->value.rows() != blob.rows ||
          p->value.cols() != blob.cols) {
        throw Error("parameter mismatch restoring '" + blob.name + "': have " +
                    p->name + " " + std::to_string(p->value.rows()) + "x" +
                    std::to_string(p->value.cols()) + ", stored " +
                    std::to_string(blob.rows) + "x" +
                    std::to_string(blob.cols));
      }
      for (int r = 0; r < blob.rows; ++r) {
        for (int c = 0; c < blob.cols; ++c) {
          p->value(r, c) =
              blob.data[static_cast<std::size_t>(r) * blob.cols + c];
        }
      }
      p->adam_m.setZero();
      p->adam_v.setZero();
      p->grad.setZero();
    }
  }
}

Model RestoreModel(const Checkpoint& checkpoint, std::uint64_t seed) {
  Model model(checkpoint.config, seed);
  std::vector<std::string> names;
  for (const GroupBlob& g : checkpoint.groups) names.push_back(g.name);
  LoadGroupsInto(checkpoint, names, &model);
  model.SetStep(checkpoint.step);
  return model;
}

void SaveCheckpoint(const Checkpoint& checkpoint, const std::string& path) {
  nlohmann::json header;
  header["version"] = checkpoint.version;
  header["config"] = nlohmann::json::parse(
      ModelConfigToJsonText(checkpoint.config));
  header["step"] = checkpoint.step;
  header["changed_groups"] = checkpoint.changed_groups;
  nlohmann::json groups = nlohmann::json::array();
  for (const GroupBlob& g : checkpoint.groups) {
    nlohmann::json jg;
    jg["name"] = g.name;
    jg["fingerprint"] = g.fingerprint;
    nlohmann::json params = nlohmann::json::array();
    for (const ParamBlob& p : g.params) {
      params.push_back({{"name", p.name}, {"rows", p.rows}, {"cols", p.cols}});
    }
    jg["params"] = params;
    groups.push_back(jg);
  }
  header["groups"] = groups;
  const std::string header_text = header.dump();
  if (header_text.size() > kMaxHeaderBytes) {
    throw Error("checkpoint header too large");
  }

  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open checkpoint for writing: " + tmp);
    out.write(kMagic, kMagicLen);
    const std::uint32_t len = static_cast<std::uint32_t>(header_text.size());
    out.write(reinterpret_cast<const char*>(&len), sizeof(len));
    out.write(header_text.data(),
              static_cast<std::streamsize>(header_text.size()));
    for (const GroupBlob& g : checkpoint.groups) {
      for (const ParamBlob& p : g.params) {
        out.write(reinterpret_cast<const char*>(p.data.data()),
                  static_cast<std::streamsize>(p.data.size() *
                                               sizeof(double)));
      }
    }
    if (!out) throw Error("short write saving checkpoint: " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    throw Error("cannot move checkpoint into place: " + ec.message());
  }
}

Checkpoint LoadCheckpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open checkpoint: " + path);
  char magic[kMagicLen];
  in.read(magic, kMagicLen);
  if (!in || std::memcmp(magic, kMagic, kMagicLen) != 0) {
    throw Error("not a checkpoint file (bad magic): " + path);
  }
  std::uint32_t len = 0;
  in.read(reinterpret_cast<char*>(&len), sizeof(len));
  if (!in || len == 0 || len > kMaxHeaderBytes) {
    throw Error("corrupt checkpoint header length: " + path);
  }
  std::string header_text(len, '\0');
  in.read(header_text.data(), len);
  if (!in) throw Error("truncated checkpoint header: " + path);

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(header_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("corrupt checkpoint header: ") + e.what());
  }

  Checkpoint out;
  try {
    out.version = header.at("version").get<int>();
    if (out.version != 1) {
      throw Error("unsupported checkpoint version " +
                  std::to_string(out.version));
    }
    out.config = ModelConfigFromJsonText(header.at("config").dump());
    out.step = header.at("step").get<int>();
    out.changed_groups =
        header.value("changed_groups", std::vector<std::string>{});
    for (const auto& jg : header.at("groups")) {
      GroupBlob group;
      group.name = jg.at("name").get<std::string>();
      group.fingerprint = jg.at("fingerprint").get<std::string>();
      for (const auto& jp : jg.at("params")) {
        ParamBlob blob;
        blob.name = jp.at("name").get<std::string>();
        blob.rows = jp.at("rows").get<int>();
        blob.cols = jp.at("cols").get<int>();
        if (blob.rows < 0 || blob.cols < 0) {
          throw Error("negative parameter shape in checkpoint header");
        }
        group.params.push_back(std::move(blob));
      }
      out.groups.push_back(std::move(group));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("bad checkpoint header field: ") + e.what());
  }

  for (GroupBlob& g : out.groups) {
    for (ParamBlob& p : g.params) {
      p.data.resize(static_cast<std::size_t>(p.rows) * p.cols);
      in.read(reinterpret_cast<char*>(p.data.data()),
              static_cast<std::streamsize>(p.data.size() * sizeof(double)));
      if (!in) {
        throw Error("truncated checkpoint payload at parameter '" + p.name +
                    "'");
      }
    }
  }
  in.peek();
  if (!in.eof()) {
    throw Error("trailing bytes after checkpoint payload: " + path);
  }

  for (const GroupBlob& g : out.groups) {
    const std::string actual = FingerprintGroup(g);
    if (actual != g.fingerprint) {
      throw Error("fingerprint mismatch for group '" + g.name +
                  "': stored " + g.fingerprint + ", computed " + actual);
    }
  }
  return out;
}

}  // namespace vshadow::s2s
