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

#include "vshadow/features/embedder.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "vshadow/common.hpp"
#include "vshadow/features/mel.hpp"

namespace vshadow::features {

namespace {

// Output scale keeping pseudo embeddings in a roughly unit range.
constexpr float kPseudoScale = 4.0f;

std::uint64_t MixLayer(std::uint64_t seed, int layer_index) {
  return seed ^ (static_cast<std::uint64_t>(layer_index) * 0x9e3779b9ULL);
}

}  // namespace

Eigen::MatrixXf PseudoProjectRows(const Eigen::MatrixXf& rows, int dim,
                                  std::uint64_t seed) {
  if (dim < 1) {
    throw Error("projection dim must be >= 1, got " + std::to_string(dim));
  }
  const int in_dim = static_cast<int>(rows.cols());
  Rng rng(seed);
  Eigen::MatrixXf proj(in_dim, dim);
  const float scale = 1.0f / std::sqrt(static_cast<float>(in_dim));
  for (int i = 0; i < in_dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      proj(i, j) = static_cast<float>(rng.Normal()) * scale;
    }
  }
  return (rows * proj) / kPseudoScale;
}

data::FeatureSequence PseudoEmbed(const Waveform& w, int dim,
                                  std::uint64_t seed) {
  const MelConfig mel_config;
  data::FeatureSequence mel = ExtractMel(w, mel_config);
  const float floor = static_cast<float>(mel_config.LogFloor());
  const Eigen::MatrixXf shifted = mel.data.array() - floor;
  return data::MakeFeatureSequence(PseudoProjectRows(shifted, dim, seed),
                                   mel.stride_ms, data::FeatureKind::kOther);
}

EmbedderRegistry EmbedderRegistry::Default() {
  EmbedderRegistry reg;
  reg.backends_[data::FeatureKind::kMel] = {"mel", 80, 0, 9, ""};
  reg.backends_[data::FeatureKind::kPpgBnf] = {"pseudo", 144, 101, 9, ""};
  reg.backends_[data::FeatureKind::kS3r] = {"pseudo", 768, 202, 9, ""};
  return reg;
}

EmbedderRegistry EmbedderRegistry::FromJsonText(const std::string& text) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("embedder config is not valid json: ") + e.what());
  }
  if (!root.is_object()) {
    throw Error("embedder config must be a json object");
  }
  EmbedderRegistry reg;
  for (const auto& [kind_name, entry] : root.items()) {
    const data::FeatureKind kind = data::FeatureKindFromName(kind_name);
    if (!entry.is_object() || !entry.contains("backend")) {
      throw Error("embedder entry for '" + kind_name +
                  "' must be an object with a backend id");
    }
    Backend backend;
    backend.id = entry.at("backend").get<std::string>();
    backend.dim = entry.value("dim", data::ExpectedDim(kind));
    backend.seed = entry.value("seed", std::uint64_t{0});
    backend.layer_index = entry.value("layer_index", 9);
    backend.model = entry.value("model", std::string());
    if (backend.id != "mel" && backend.id != "pseudo" &&
        backend.id != "external") {
      throw Error("unknown embedder backend: " + backend.id);
    }
    if (backend.id == "mel" && kind != data::FeatureKind::kMel) {
      throw Error("mel backend only serves the mel kind");
    }
    if (backend.id == "external" && backend.model.empty()) {
      throw Error("external embedder for '" + kind_name +
                  "' must name its model");
    }
    const int expected = data::ExpectedDim(kind);
    if (expected > 0 && backend.dim != expected) {
      throw Error("embedder for '" + kind_name + "' must produce dim " +
                  std::to_string(expected) + ", configured " +
                  std::to_string(backend.dim));
    }
    reg.backends_[kind] = backend;
  }
  return reg;
}

EmbedderRegistry EmbedderRegistry::FromJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error("cannot open embedder config: " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return FromJsonText(buffer.str());
}

bool EmbedderRegistry::HasBackend(data::FeatureKind kind) const {
  return backends_.count(kind) > 0;
}

const EmbedderRegistry::Backend& EmbedderRegistry::BackendFor(
    data::FeatureKind kind) const {
  auto it = backends_.find(kind);
  if (it == backends_.end()) {
    throw Error("no embedder backend registered for kind '" +
                data::FeatureKindName(kind) + "'");
  }
  return it->second;
}

data::FeatureSequence EmbedderRegistry::Embed(const Waveform& w,
                                              data::FeatureKind kind) const {
  EmbedderSpec spec;
  spec.kind = kind;
  return Embed(w, spec);
}

data::FeatureSequence EmbedderRegistry::Embed(const Waveform& w,
                                              const EmbedderSpec& spec) const {
  const Backend& backend = BackendFor(spec.kind);
  if (spec.output_dim != 0 && spec.output_dim != backend.dim) {
    throw Error("requested dim " + std::to_string(spec.output_dim) +
                " does not match backend dim " + std::to_string(backend.dim));
  }
  if (backend.id == "external") {
    throw Error("external embedder backend '" + backend.model +
                "' is not available in this build");
  }
  if (backend.id == "mel") {
    return ExtractMel(w, MelConfig{});
  }
  // The registry owns the layer choice; non-s3r kinds have no layers.
  const int layer =
      spec.kind == data::FeatureKind::kS3r ? backend.layer_index : 0;
  data::FeatureSequence out =
      PseudoEmbed(w, backend.dim, MixLayer(backend.seed, layer));
  out.kind = spec.kind;
  out.Validate();
  return out;
}

}  // namespace vshadow::features
